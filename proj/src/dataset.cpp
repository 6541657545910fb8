#include "puforge/dataset.hpp"

#include "puforge/rng.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace puforge {

Instance::Instance(std::vector<std::pair<std::uint32_t, double>> features, Label observed,
                   std::optional<Label> truth)
    : features_(std::move(features)), observed_(observed), truth_(truth) {
    double acc = 0.0;
    for (const auto& [idx, value] : features_) {
        (void)idx;
        acc += value * value;
    }
    self_dot_ = acc;
}

Dataset::Dataset(std::vector<Instance> instances, std::uint32_t dimension)
    : instances_(std::move(instances)), dimension_(dimension) {
    for (const Instance& inst : instances_) {
        dimension_ = std::max(dimension_, inst.max_index());
    }
}

std::vector<Instance> Dataset::select(Label label) const {
    std::vector<Instance> out;
    for (const Instance& inst : instances_) {
        if (inst.observed_label() == label) out.push_back(inst);
    }
    return out;
}

std::size_t Dataset::count_observed(Label label) const {
    std::size_t n = 0;
    for (const Instance& inst : instances_) {
        if (inst.observed_label() == label) ++n;
    }
    return n;
}

namespace {

double parse_double_token(std::string_view token, std::size_t line, const char* what) {
    // from_chars rejects trailing junk but also a leading '+', which the
    // sparse label grammar allows
    std::string_view body = token;
    if (body.size() > 1 && body.front() == '+') body.remove_prefix(1);
    double value = 0.0;
    const char* first = body.data();
    const char* last = body.data() + body.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ParseError(line, std::string("malformed ") + what + " '" + std::string(token) + "'");
    }
    return value;
}

} // namespace

Dataset parse_sparse_file(std::istream& in, const std::function<bool(double)>& positive_label) {
    std::vector<Instance> instances;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);

        std::string_view rest(line);
        auto next_token = [&]() -> std::string_view {
            std::size_t start = 0;
            while (start < rest.size() && std::isspace(static_cast<unsigned char>(rest[start])))
                ++start;
            std::size_t end = start;
            while (end < rest.size() && !std::isspace(static_cast<unsigned char>(rest[end])))
                ++end;
            std::string_view token = rest.substr(start, end - start);
            rest.remove_prefix(end);
            return token;
        };

        std::string_view label_token = next_token();
        if (label_token.empty()) continue; // blank or comment-only line

        const double label_value = parse_double_token(label_token, line_number, "label");

        std::vector<std::pair<std::uint32_t, double>> features;
        std::uint32_t previous_index = 0;
        for (;;) {
            std::string_view token = next_token();
            if (token.empty()) break;
            const std::size_t colon = token.find(':');
            if (colon == std::string_view::npos) {
                throw ParseError(line_number,
                                 "expected index:value, got '" + std::string(token) + "'");
            }
            std::string_view index_part = token.substr(0, colon);
            std::uint32_t index = 0;
            auto [ptr, ec] =
                std::from_chars(index_part.data(), index_part.data() + index_part.size(), index);
            if (ec != std::errc() || ptr != index_part.data() + index_part.size()) {
                throw ParseError(line_number,
                                 "malformed feature index '" + std::string(index_part) + "'");
            }
            if (index < 1) throw ParseError(line_number, "feature index must be >= 1");
            if (index <= previous_index) {
                throw ParseError(line_number, "feature indices not strictly increasing");
            }
            previous_index = index;
            const double value =
                parse_double_token(token.substr(colon + 1), line_number, "feature value");
            features.emplace_back(index, value);
        }

        const bool positive = positive_label ? positive_label(label_value) : label_value == 1.0;
        const Label truth = positive ? Label::Positive : Label::Negative;
        instances.emplace_back(std::move(features), truth, truth);
    }
    return Dataset(std::move(instances));
}

Dataset parse_sparse_file_path(const std::string& path,
                               const std::function<bool(double)>& positive_label) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file: " + path);
    return parse_sparse_file(in, positive_label);
}

void serialize_sparse(const Dataset& data, std::ostream& out) {
    char buf[64];
    for (const Instance& inst : data.instances()) {
        const bool positive = inst.true_label().value_or(
                                  inst.observed_label() == Label::Positive ? Label::Positive
                                                                           : Label::Negative) ==
                              Label::Positive;
        out << (positive ? "+1" : "-1");
        for (const auto& [idx, value] : inst.features()) {
            std::snprintf(buf, sizeof(buf), " %u:%.17g", idx, value);
            out << buf;
        }
        out << '\n';
    }
}

Dataset generate_synthetic(std::size_t n_pos, std::size_t n_neg, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Instance> instances;
    instances.reserve(n_pos + n_neg);
    auto point = [](double x, double y) {
        std::vector<std::pair<std::uint32_t, double>> f;
        if (x != 0.0) f.emplace_back(1u, x);
        if (y != 0.0) f.emplace_back(2u, y);
        return f;
    };
    for (std::size_t i = 0; i < n_pos; ++i) {
        const double x = rng.next_normal();
        const double y = rng.next_normal();
        instances.emplace_back(point(x, y), Label::Positive, Label::Positive);
    }
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    for (std::size_t i = 0; i < n_neg; ++i) {
        const double angle = kTwoPi * rng.next_double();
        const double x = 4.0 * std::cos(angle) + rng.next_normal();
        const double y = 4.0 * std::sin(angle) + rng.next_normal();
        instances.emplace_back(point(x, y), Label::Negative, Label::Negative);
    }
    return Dataset(std::move(instances), 2);
}

namespace {

// Fisher-Yates prefix: the first `take` slots end up as a uniform sample
// without replacement.
std::vector<std::uint32_t> sample_without_replacement(std::vector<std::uint32_t>& indices,
                                                      std::size_t take, Rng& rng) {
    std::vector<std::uint32_t> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(indices.size() - i));
        std::swap(indices[i], indices[j]);
        out.push_back(indices[i]);
    }
    indices.erase(indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(take));
    return out;
}

} // namespace

SubsampleResult subsample_split(const Dataset& data, std::size_t train_p, std::size_t train_u,
                                std::size_t test_p, std::size_t test_n, std::uint64_t seed) {
    std::vector<std::uint32_t> pos_pool, neg_pool;
    for (std::uint32_t i = 0; i < data.size(); ++i) {
        const auto truth = data[i].true_label();
        if (!truth) throw DataError("subsample_split requires true labels");
        (*truth == Label::Positive ? pos_pool : neg_pool).push_back(i);
    }
    if (pos_pool.size() < train_p + test_p) {
        throw DataError("not enough true positives: need " + std::to_string(train_p + test_p) +
                        ", have " + std::to_string(pos_pool.size()));
    }
    if (neg_pool.size() < train_u + test_n) {
        throw DataError("not enough true negatives: need " + std::to_string(train_u + test_n) +
                        ", have " + std::to_string(neg_pool.size()));
    }

    Rng rng(seed);
    const auto train_pos_idx = sample_without_replacement(pos_pool, train_p, rng);
    const auto test_pos_idx = sample_without_replacement(pos_pool, test_p, rng);
    const auto train_neg_idx = sample_without_replacement(neg_pool, train_u, rng);
    const auto test_neg_idx = sample_without_replacement(neg_pool, test_n, rng);

    std::vector<Instance> train;
    train.reserve(train_p + train_u);
    for (auto i : train_pos_idx) train.push_back(data[i].with_observed(Label::Positive));
    for (auto i : train_neg_idx) train.push_back(data[i].with_observed(Label::Unlabeled));

    std::vector<Instance> test;
    test.reserve(test_p + test_n);
    for (auto i : test_pos_idx) test.push_back(data[i].with_observed(Label::Positive));
    for (auto i : test_neg_idx) test.push_back(data[i].with_observed(Label::Negative));

    std::vector<Instance> leftover;
    leftover.reserve(pos_pool.size() + neg_pool.size());
    for (auto i : pos_pool) leftover.push_back(data[i]);
    for (auto i : neg_pool) leftover.push_back(data[i]);

    return SubsampleResult{Dataset(std::move(train), data.dimension()),
                           Dataset(std::move(test), data.dimension()),
                           Dataset(std::move(leftover), data.dimension())};
}

std::size_t contamination_count(double rate, std::size_t size) {
    return static_cast<std::size_t>(std::floor(rate * static_cast<double>(size) + 0.5));
}

Dataset contaminate(const Dataset& train, const Dataset& pool, const ContaminationSpec& spec) {
    if (spec.rate_p < 0.0 || spec.rate_p >= 0.5 || spec.rate_u < 0.0 || spec.rate_u >= 0.5) {
        throw DataError("contamination rates must lie in [0, 0.5)");
    }

    std::vector<std::uint32_t> p_slots, u_slots;
    for (std::uint32_t i = 0; i < train.size(); ++i) {
        if (train[i].observed_label() == Label::Positive) p_slots.push_back(i);
        else if (train[i].observed_label() == Label::Unlabeled) u_slots.push_back(i);
    }
    const std::size_t flip_p = contamination_count(spec.rate_p, p_slots.size());
    const std::size_t flip_u = contamination_count(spec.rate_u, u_slots.size());

    std::vector<std::uint32_t> pool_neg, pool_pos;
    for (std::uint32_t i = 0; i < pool.size(); ++i) {
        const auto truth = pool[i].true_label();
        if (!truth) continue;
        (*truth == Label::Negative ? pool_neg : pool_pos).push_back(i);
    }
    if (pool_neg.size() < flip_p) {
        throw DataError("negative pool too small: need " + std::to_string(flip_p) + ", have " +
                        std::to_string(pool_neg.size()));
    }
    if (pool_pos.size() < flip_u) {
        throw DataError("positive pool too small: need " + std::to_string(flip_u) + ", have " +
                        std::to_string(pool_pos.size()));
    }

    Rng rng(spec.seed);
    std::vector<Instance> out = train.instances();

    const auto victims_p = sample_without_replacement(p_slots, flip_p, rng);
    const auto donors_p = sample_without_replacement(pool_neg, flip_p, rng);
    for (std::size_t k = 0; k < flip_p; ++k) {
        out[victims_p[k]] = pool[donors_p[k]].with_observed(Label::Positive);
    }

    const auto victims_u = sample_without_replacement(u_slots, flip_u, rng);
    const auto donors_u = sample_without_replacement(pool_pos, flip_u, rng);
    for (std::size_t k = 0; k < flip_u; ++k) {
        out[victims_u[k]] = pool[donors_u[k]].with_observed(Label::Unlabeled);
    }

    return Dataset(std::move(out), train.dimension());
}

std::vector<std::uint32_t> bootstrap_indices(std::size_t source_size, std::size_t n,
                                             std::uint64_t seed) {
    if (source_size == 0) throw DataError("bootstrap from empty source");
    Rng rng(seed);
    std::vector<std::uint32_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<std::uint32_t>(rng.next_below(source_size));
    }
    return out;
}

std::vector<Instance> bootstrap(const std::vector<Instance>& source, std::size_t n,
                                std::uint64_t seed) {
    const auto indices = bootstrap_indices(source.size(), n, seed);
    std::vector<Instance> out;
    out.reserve(n);
    for (auto i : indices) out.push_back(source[i]);
    return out;
}

} // namespace puforge
