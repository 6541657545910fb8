#include "puforge/kernel.hpp"

#include <cmath>

namespace puforge {

double sparse_dot(const Instance& a, const Instance& b) {
    const auto& fa = a.features();
    const auto& fb = b.features();
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < fa.size() && j < fb.size()) {
        if (fa[i].first == fb[j].first) {
            acc += fa[i].second * fb[j].second;
            ++i;
            ++j;
        } else if (fa[i].first < fb[j].first) {
            ++i;
        } else {
            ++j;
        }
    }
    return acc;
}

double kernel_eval(const KernelSpec& spec, const Instance& a, const Instance& b) {
    if (spec.kind == KernelSpec::Kind::Linear) return sparse_dot(a, b);
    const double d2 = a.self_dot() + b.self_dot() - 2.0 * sparse_dot(a, b);
    return std::exp(-spec.gamma * (d2 > 0.0 ? d2 : 0.0));
}

std::shared_ptr<const std::vector<double>> gram_row(const KernelSpec& spec, std::size_t i,
                                                    const std::vector<const Instance*>& data,
                                                    GramRowCache* cache) {
    if (cache) {
        if (auto row = cache->get(i)) {
            cache->count_hit();
            return row;
        }
    }
    auto row = std::make_shared<std::vector<double>>(data.size());
    const Instance& xi = *data[i];
    for (std::size_t j = 0; j < data.size(); ++j) {
        (*row)[j] = kernel_eval(spec, xi, *data[j]);
    }
    if (cache) cache->put(i, row);
    return row;
}

} // namespace puforge
