#include "puforge/cwsvm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace puforge {

namespace {

constexpr double kTau = 1e-12; // curvature floor for degenerate pairs

struct Smo {
    std::vector<const Instance*> x;
    std::vector<std::int8_t> y;
    std::vector<double> c;
    KernelSpec kernel;
    std::vector<double> alpha;
    std::vector<double> grad; // grad_i of 1/2 a'Qa - e'a, starts at -1
    GramRowCache cache;

    Smo(const std::vector<Instance>& positives, const std::vector<Instance>& unlabeled,
        const CwsvmParams& params)
        : kernel(params.kernel), cache(params.cache_bytes) {
        const std::size_t n = positives.size() + unlabeled.size();
        x.reserve(n);
        y.reserve(n);
        c.reserve(n);
        for (const Instance& p : positives) {
            x.push_back(&p);
            y.push_back(+1);
            c.push_back(params.c_p);
        }
        for (const Instance& u : unlabeled) {
            x.push_back(&u);
            y.push_back(-1);
            c.push_back(params.c_u);
        }
        alpha.assign(n, 0.0);
        grad.assign(n, -1.0);
    }

    std::size_t size() const { return x.size(); }

    bool in_up(std::size_t i) const {
        return y[i] > 0 ? alpha[i] < c[i] : alpha[i] > 0.0;
    }
    bool in_low(std::size_t i) const {
        return y[i] > 0 ? alpha[i] > 0.0 : alpha[i] < c[i];
    }

    // Maximal violating pair; ties go to the lowest index so runs are
    // deterministic. Returns the violation m - M.
    double select(std::size_t& i_out, std::size_t& j_out) const {
        double m = -std::numeric_limits<double>::infinity();
        double M = std::numeric_limits<double>::infinity();
        std::size_t i_best = size(), j_best = size();
        for (std::size_t t = 0; t < size(); ++t) {
            const double v = -static_cast<double>(y[t]) * grad[t];
            if (in_up(t) && v > m) {
                m = v;
                i_best = t;
            }
            if (in_low(t) && v < M) {
                M = v;
                j_best = t;
            }
        }
        i_out = i_best;
        j_out = j_best;
        return m - M;
    }

    // Two-variable step. The clipped variable is recomputed from the
    // preserved pair invariant (difference or sum), so y'a stays exactly
    // zero in floating point.
    void update_pair(std::size_t i, std::size_t j) {
        const auto row_i = gram_row(kernel, i, x, &cache);
        const auto row_j = gram_row(kernel, j, x, &cache);
        const double kii = (*row_i)[i];
        const double kjj = (*row_j)[j];
        const double kij = (*row_i)[j];
        double quad = kii + kjj - 2.0 * kij;
        if (quad <= 0.0) quad = kTau;

        const double old_ai = alpha[i];
        const double old_aj = alpha[j];

        if (y[i] != y[j]) {
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else {
                if (alpha[i] < 0.0) {
                    alpha[i] = 0.0;
                    alpha[j] = -diff;
                }
            }
            if (diff > c[i] - c[j]) {
                if (alpha[i] > c[i]) {
                    alpha[i] = c[i];
                    alpha[j] = c[i] - diff;
                }
            } else {
                if (alpha[j] > c[j]) {
                    alpha[j] = c[j];
                    alpha[i] = c[j] + diff;
                }
            }
        } else {
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c[i]) {
                if (alpha[i] > c[i]) {
                    alpha[i] = c[i];
                    alpha[j] = sum - c[i];
                }
            } else {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
            }
            if (sum > c[j]) {
                if (alpha[j] > c[j]) {
                    alpha[j] = c[j];
                    alpha[i] = sum - c[j];
                }
            } else {
                if (alpha[i] < 0.0) {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
        }

        const double dai = alpha[i] - old_ai;
        const double daj = alpha[j] - old_aj;
        for (std::size_t t = 0; t < size(); ++t) {
            grad[t] += static_cast<double>(y[t]) *
                       (static_cast<double>(y[i]) * (*row_i)[t] * dai +
                        static_cast<double>(y[j]) * (*row_j)[t] * daj);
        }
    }

    double compute_bias() const {
        double free_sum = 0.0;
        std::size_t free_count = 0;
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < size(); ++t) {
            const double b_t = -static_cast<double>(y[t]) * grad[t]; // y_t - F_t
            if (alpha[t] > 0.0 && alpha[t] < c[t]) {
                free_sum += b_t;
                ++free_count;
            } else {
                if (in_up(t)) lo = std::max(lo, b_t);
                if (in_low(t)) hi = std::min(hi, b_t);
            }
        }
        if (free_count > 0) return free_sum / static_cast<double>(free_count);
        if (std::isinf(lo)) return std::isinf(hi) ? 0.0 : hi;
        if (std::isinf(hi)) return lo;
        return 0.5 * (lo + hi);
    }
};

} // namespace

CwsvmModel train_cwsvm(const std::vector<Instance>& positives,
                       const std::vector<Instance>& unlabeled, const CwsvmParams& params) {
    if (positives.empty() || unlabeled.empty()) {
        throw DataError("train_cwsvm requires non-empty P and U");
    }
    if (params.c_p <= 0.0 || params.c_u <= 0.0 || params.tolerance <= 0.0) {
        throw DataError("penalties and tolerance must be positive");
    }
    if (params.kernel.kind == KernelSpec::Kind::Rbf && params.kernel.gamma <= 0.0) {
        throw DataError("RBF gamma must be positive");
    }

    Smo smo(positives, unlabeled, params);
    const std::size_t n = smo.size();
    const std::size_t passes = params.max_passes ? params.max_passes : 10 * n;
    const std::size_t budget = passes * n;

    bool converged = false;
    for (std::size_t iter = 0; iter < budget; ++iter) {
        std::size_t i, j;
        const double violation = smo.select(i, j);
        if (violation <= params.tolerance) {
            converged = true;
            break;
        }
        smo.update_pair(i, j);
    }
    if (!converged) {
        std::size_t i, j;
        converged = smo.select(i, j) <= params.tolerance;
    }

    const double bias = smo.compute_bias();

    std::vector<SupportVector> svs;
    std::uint32_t dimension = 0;
    for (std::size_t t = 0; t < n; ++t) {
        dimension = std::max(dimension, smo.x[t]->max_index());
        if (smo.alpha[t] > 0.0) {
            svs.push_back(SupportVector{*smo.x[t], smo.y[t], smo.alpha[t]});
        }
    }
    return CwsvmModel(std::move(svs), bias, params, converged, dimension);
}

CwsvmModel::CwsvmModel(std::vector<SupportVector> svs, double bias, CwsvmParams params,
                       bool converged, std::uint32_t dimension)
    : svs_(std::move(svs)), bias_(bias), params_(params), converged_(converged) {
    if (params_.kernel.kind == KernelSpec::Kind::Linear) {
        weights_.assign(dimension + 1, 0.0);
        for (const SupportVector& sv : svs_) {
            const double coef = sv.alpha * static_cast<double>(sv.y);
            for (const auto& [idx, value] : sv.x.features()) {
                weights_[idx] += coef * value;
            }
        }
    }
}

double CwsvmModel::decision_value(const Instance& x) const {
    if (!weights_.empty()) {
        double acc = 0.0;
        for (const auto& [idx, value] : x.features()) {
            if (idx < weights_.size()) acc += weights_[idx] * value;
        }
        return acc + bias_;
    }
    double acc = 0.0;
    for (const SupportVector& sv : svs_) {
        acc += sv.alpha * static_cast<double>(sv.y) * kernel_eval(params_.kernel, sv.x, x);
    }
    return acc + bias_;
}

double dual_objective(const CwsvmModel& model, const std::vector<Instance>& positives,
                      const std::vector<Instance>& unlabeled) {
    const auto& svs = model.support_vectors();
    double quad = 0.0;
    for (std::size_t i = 0; i < svs.size(); ++i) {
        for (std::size_t j = 0; j < svs.size(); ++j) {
            quad += svs[i].alpha * static_cast<double>(svs[i].y) * svs[j].alpha *
                    static_cast<double>(svs[j].y) *
                    kernel_eval(model.params().kernel, svs[i].x, svs[j].x);
        }
    }
    double slack = 0.0;
    for (const Instance& p : positives) {
        slack += model.params().c_p * std::max(0.0, 1.0 - model.decision_value(p));
    }
    for (const Instance& u : unlabeled) {
        slack += model.params().c_u * std::max(0.0, 1.0 + model.decision_value(u));
    }
    return 0.5 * quad + slack;
}

namespace {

void write_features(std::ostream& out, const Instance& x) {
    char buf[64];
    for (const auto& [idx, value] : x.features()) {
        std::snprintf(buf, sizeof(buf), " %u:%.17g", idx, value);
        out << buf;
    }
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void CwsvmModel::save(std::ostream& out) const {
    out << "puforge-cwsvm-v1\n";
    if (params_.kernel.kind == KernelSpec::Kind::Linear) {
        out << "kernel linear\n";
    } else {
        out << "kernel rbf " << format_g17(params_.kernel.gamma) << "\n";
    }
    out << "penalties " << format_g17(params_.c_p) << " " << format_g17(params_.c_u) << "\n";
    out << "converged " << (converged_ ? 1 : 0) << "\n";
    out << "bias " << format_g17(bias_) << "\n";
    out << "nsv " << svs_.size() << "\n";
    for (const SupportVector& sv : svs_) {
        out << format_g17(sv.alpha * static_cast<double>(sv.y));
        write_features(out, sv.x);
        out << "\n";
    }
}

CwsvmModel CwsvmModel::load(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "puforge-cwsvm-v1") {
        throw DataError("not a cwsvm model file");
    }
    CwsvmParams params;
    std::string word;

    in >> word;
    if (word != "kernel") throw DataError("model file: expected kernel line");
    in >> word;
    if (word == "linear") {
        params.kernel = KernelSpec::linear();
    } else if (word == "rbf") {
        double gamma;
        in >> gamma;
        params.kernel = KernelSpec::rbf(gamma);
    } else {
        throw DataError("model file: unknown kernel '" + word + "'");
    }

    in >> word;
    if (word != "penalties") throw DataError("model file: expected penalties line");
    in >> params.c_p >> params.c_u;

    int converged_flag = 1;
    in >> word >> converged_flag;
    if (word != "converged") throw DataError("model file: expected converged line");

    double bias = 0.0;
    in >> word >> bias;
    if (word != "bias") throw DataError("model file: expected bias line");

    std::size_t nsv = 0;
    in >> word >> nsv;
    if (word != "nsv") throw DataError("model file: expected nsv line");
    std::getline(in, line); // consume end of nsv line

    std::vector<SupportVector> svs;
    svs.reserve(nsv);
    std::uint32_t dimension = 0;
    for (std::size_t k = 0; k < nsv; ++k) {
        if (!std::getline(in, line)) throw DataError("model file: truncated support vectors");
        std::istringstream ls(line);
        double alpha_y;
        if (!(ls >> alpha_y)) throw DataError("model file: bad support vector line");
        std::vector<std::pair<std::uint32_t, double>> features;
        std::string tok;
        while (ls >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) throw DataError("model file: bad feature token");
            features.emplace_back(static_cast<std::uint32_t>(std::stoul(tok.substr(0, colon))),
                                  std::stod(tok.substr(colon + 1)));
        }
        Instance x(std::move(features), Label::Unlabeled);
        dimension = std::max(dimension, x.max_index());
        svs.push_back(SupportVector{std::move(x), static_cast<std::int8_t>(alpha_y >= 0 ? 1 : -1),
                                    std::fabs(alpha_y)});
    }
    return CwsvmModel(std::move(svs), bias, params, converged_flag != 0, dimension);
}

} // namespace puforge
