// Test-only reference implementations, kept independent of the library code
// paths they check.

#ifndef PUFORGE_TESTS_ORACLES_HPP
#define PUFORGE_TESTS_ORACLES_HPP

#include "puforge/dataset.hpp"
#include "puforge/kernel.hpp"
#include "puforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracles {

// ---------------------------------------------------------------------------
// Brute-force QP reference: minimize 1/2 a'Qa - e'a over the box [0, C]
// intersected with y'a = 0, by projected gradient descent. Dense, slow, only
// for tiny problems.
// ---------------------------------------------------------------------------

struct QpProblem {
    std::vector<std::vector<double>> k; // kernel matrix
    std::vector<int> y;                 // +1 / -1
    std::vector<double> c;              // per-instance box
};

// Euclidean projection onto {0 <= a <= C, y'a = 0} via bisection on the
// hyperplane multiplier.
inline std::vector<double> project_feasible(const QpProblem& prob, std::vector<double> v) {
    const std::size_t n = v.size();
    auto constraint = [&](double lambda) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = std::clamp(v[i] - lambda * prob.y[i], 0.0, prob.c[i]);
            sum += prob.y[i] * a;
        }
        return sum;
    };
    double span = 1.0;
    for (std::size_t i = 0; i < n; ++i) span = std::max(span, std::fabs(v[i]) + prob.c[i]);
    double lo = -2.0 * span, hi = 2.0 * span;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (constraint(mid) > 0.0 ? lo : hi) = mid;
    }
    const double lambda = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = std::clamp(v[i] - lambda * prob.y[i], 0.0, prob.c[i]);
    }
    return v;
}

inline std::vector<double> solve_qp_reference(const QpProblem& prob, int iterations = 150000) {
    const std::size_t n = prob.y.size();
    double lipschitz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::fabs(prob.k[i][j]);
        lipschitz = std::max(lipschitz, row);
    }
    const double step = 1.0 / std::max(lipschitz, 1e-8);

    std::vector<double> alpha = project_feasible(prob, std::vector<double>(n, 0.0));
    std::vector<double> next(n);
    for (int iter = 0; iter < iterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double grad = -1.0;
            for (std::size_t j = 0; j < n; ++j) {
                grad += prob.y[i] * prob.y[j] * prob.k[i][j] * alpha[j];
            }
            next[i] = alpha[i] - step * grad;
        }
        next = project_feasible(prob, std::move(next));
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) moved += std::fabs(next[i] - alpha[i]);
        alpha.swap(next);
        if (moved < 1e-13) break;
    }
    return alpha;
}

// Bias from a dual solution: mean over free vectors, else the midpoint of
// the feasible interval.
inline double bias_from_alpha(const QpProblem& prob, const std::vector<double>& alpha) {
    const std::size_t n = alpha.size();
    auto f = [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += alpha[j] * prob.y[j] * prob.k[j][i];
        return acc;
    };
    double sum_free = 0.0;
    std::size_t n_free = 0;
    double lo = -1e300, hi = 1e300;
    const double margin = 1e-9;
    for (std::size_t i = 0; i < n; ++i) {
        const double target = prob.y[i] - f(i);
        if (alpha[i] > margin && alpha[i] < prob.c[i] - margin) {
            sum_free += target;
            ++n_free;
        } else if (alpha[i] <= margin) {
            (prob.y[i] > 0 ? lo : hi) = prob.y[i] > 0 ? std::max(lo, target)
                                                      : std::min(hi, target);
        } else {
            (prob.y[i] > 0 ? hi : lo) = prob.y[i] > 0 ? std::min(hi, target)
                                                      : std::max(lo, target);
        }
    }
    if (n_free > 0) return sum_free / static_cast<double>(n_free);
    if (lo <= -1e300) return hi;
    if (hi >= 1e300) return lo;
    return 0.5 * (lo + hi);
}

// Value of the class-weighted objective (quadratic term plus weighted
// slacks) at (alpha, bias).
inline double objective_value(const QpProblem& prob, const std::vector<double>& alpha,
                              double bias) {
    const std::size_t n = alpha.size();
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            quad += alpha[i] * alpha[j] * prob.y[i] * prob.y[j] * prob.k[i][j];
        }
    }
    double slack = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double psi = bias;
        for (std::size_t j = 0; j < n; ++j) psi += alpha[j] * prob.y[j] * prob.k[j][i];
        slack += prob.c[i] * std::max(0.0, 1.0 - prob.y[i] * psi);
    }
    return 0.5 * quad + slack;
}

// ---------------------------------------------------------------------------
// Threshold-sweep AUC oracles: per-threshold confusion matrices recounted
// from scratch (O(n^2)), then integrated with the same interpolation
// semantics written independently.
// ---------------------------------------------------------------------------

inline double auc_roc_sweep(const std::vector<puforge::ScoredLabel>& scored) {
    std::vector<double> thresholds;
    for (const auto& s : scored) thresholds.push_back(s.score);
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    double total_pos = 0.0, total_neg = 0.0;
    for (const auto& s : scored) (s.truth > 0 ? total_pos : total_neg) += 1.0;

    double area = 0.0, prev_fpr = 0.0, prev_tpr = 0.0;
    for (double t : thresholds) {
        double tp = 0.0, fp = 0.0;
        for (const auto& s : scored) {
            if (s.score >= t) (s.truth > 0 ? tp : fp) += 1.0;
        }
        const double fpr = fp / total_neg;
        const double tpr = tp / total_pos;
        area += (fpr - prev_fpr) * 0.5 * (tpr + prev_tpr);
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    return area;
}

inline double auc_pr_sweep(const std::vector<puforge::ScoredLabel>& scored) {
    std::vector<double> thresholds;
    for (const auto& s : scored) thresholds.push_back(s.score);
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    double total_pos = 0.0;
    for (const auto& s : scored) {
        if (s.truth > 0) total_pos += 1.0;
    }

    double area = 0.0;
    double tp_prev = 0.0, fp_prev = 0.0;
    for (double t : thresholds) {
        double tp = 0.0, fp = 0.0;
        for (const auto& s : scored) {
            if (s.score >= t) (s.truth > 0 ? tp : fp) += 1.0;
        }
        if (tp > tp_prev) {
            const double slope = (fp - fp_prev) / (tp - tp_prev);
            double prec_prev = (tp_prev == 0.0 && fp_prev == 0.0)
                                   ? tp / (tp + fp)
                                   : tp_prev / (tp_prev + fp_prev);
            for (double step = tp_prev + 1.0; step <= tp + 0.5; step += 1.0) {
                const double fp_at = fp_prev + slope * (step - tp_prev);
                const double prec = step / (step + fp_at);
                area += 0.5 * (prec_prev + prec) / total_pos;
                prec_prev = prec;
            }
        }
        tp_prev = tp;
        fp_prev = fp;
    }
    return area;
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank by full sign enumeration (2^n assignments).
// ---------------------------------------------------------------------------

inline double wilcoxon_exact_enumeration(const std::vector<double>& a,
                                         const std::vector<double>& b) {
    std::vector<double> mags;
    std::vector<bool> positive;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) {
            mags.push_back(std::fabs(d));
            positive.push_back(d > 0.0);
        }
    }
    const std::size_t n = mags.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return mags[i] < mags[j]; });
    std::vector<double> rank(n);
    std::size_t s = 0;
    while (s < n) {
        std::size_t e = s;
        while (e + 1 < n && mags[order[e + 1]] == mags[order[s]]) ++e;
        const double mid = 0.5 * static_cast<double>(s + e) + 1.0;
        for (std::size_t k = s; k <= e; ++k) rank[order[k]] = mid;
        s = e + 1;
    }

    double observed = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (positive[i]) observed += rank[i];
    }

    std::uint64_t at_least = 0;
    const std::uint64_t total = 1ull << n;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1ull << i)) w += rank[i];
        }
        if (w >= observed - 1e-12) ++at_least;
    }
    return static_cast<double>(at_least) / static_cast<double>(total);
}

} // namespace oracles

#endif
