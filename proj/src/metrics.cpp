#include "puforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace puforge {

namespace {

// Cumulative (tp, fp) at every distinct threshold, descending score order.
struct CountPath {
    std::vector<std::size_t> tp, fp;
    std::size_t total_pos = 0, total_neg = 0;
};

CountPath count_path(std::vector<ScoredLabel> scored) {
    std::stable_sort(scored.begin(), scored.end(),
                     [](const ScoredLabel& a, const ScoredLabel& b) { return a.score > b.score; });
    CountPath path;
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < scored.size(); ++i) {
        if (scored[i].truth > 0) ++tp;
        else ++fp;
        const bool boundary = i + 1 == scored.size() || scored[i + 1].score != scored[i].score;
        if (boundary) {
            path.tp.push_back(tp);
            path.fp.push_back(fp);
        }
    }
    path.total_pos = tp;
    path.total_neg = fp;
    return path;
}

} // namespace

Curve pr_curve(const std::vector<ScoredLabel>& scored) {
    CountPath path = count_path(scored);
    if (path.total_pos == 0) throw MetricError("pr_curve: no positive instances");

    Curve curve;
    curve.kind = Curve::Kind::PR;
    curve.total_pos = path.total_pos;
    curve.total_neg = path.total_neg;
    curve.tp = path.tp;
    curve.fp = path.fp;
    const double p = static_cast<double>(path.total_pos);
    for (std::size_t k = 0; k < path.tp.size(); ++k) {
        const double tp = static_cast<double>(path.tp[k]);
        const double fp = static_cast<double>(path.fp[k]);
        curve.points.push_back(CurvePoint{tp / p, tp / (tp + fp)});
    }
    return curve;
}

Curve roc_curve(const std::vector<ScoredLabel>& scored) {
    CountPath path = count_path(scored);
    if (path.total_pos == 0 || path.total_neg == 0) {
        throw MetricError("roc_curve: both classes must be present");
    }

    Curve curve;
    curve.kind = Curve::Kind::ROC;
    curve.total_pos = path.total_pos;
    curve.total_neg = path.total_neg;
    curve.tp.push_back(0);
    curve.fp.push_back(0);
    curve.points.push_back(CurvePoint{0.0, 0.0});
    const double p = static_cast<double>(path.total_pos);
    const double n = static_cast<double>(path.total_neg);
    for (std::size_t k = 0; k < path.tp.size(); ++k) {
        curve.tp.push_back(path.tp[k]);
        curve.fp.push_back(path.fp[k]);
        curve.points.push_back(CurvePoint{static_cast<double>(path.fp[k]) / n,
                                          static_cast<double>(path.tp[k]) / p});
    }
    return curve;
}

double auc(const Curve& curve) {
    if (curve.points.empty()) throw MetricError("auc: empty curve");
    if (curve.kind == Curve::Kind::ROC) {
        double area = 0.0;
        for (std::size_t k = 1; k < curve.points.size(); ++k) {
            const auto& a = curve.points[k - 1];
            const auto& b = curve.points[k];
            area += (b.x - a.x) * 0.5 * (a.y + b.y);
        }
        return area;
    }

    // PR: walk the count path from the (0,0) anchor, interpolating FP
    // linearly in TP and accumulating trapezoids at unit TP steps.
    const double total_pos = static_cast<double>(curve.total_pos);
    double area = 0.0;
    std::size_t tp_a = 0, fp_a = 0;
    for (std::size_t k = 0; k < curve.tp.size(); ++k) {
        const std::size_t tp_b = curve.tp[k];
        const std::size_t fp_b = curve.fp[k];
        if (tp_b > tp_a) {
            const double slope = static_cast<double>(fp_b - fp_a) /
                                 static_cast<double>(tp_b - tp_a);
            double prev = (tp_a == 0 && fp_a == 0)
                              ? static_cast<double>(tp_b) / static_cast<double>(tp_b + fp_b)
                              : static_cast<double>(tp_a) / static_cast<double>(tp_a + fp_a);
            for (std::size_t t = tp_a + 1; t <= tp_b; ++t) {
                const double fp_t =
                    static_cast<double>(fp_a) + slope * static_cast<double>(t - tp_a);
                const double prec = static_cast<double>(t) / (static_cast<double>(t) + fp_t);
                area += 0.5 * (prev + prec) / total_pos;
                prev = prec;
            }
        }
        tp_a = tp_b;
        fp_a = fp_b;
    }
    return area;
}

double pu_score(const std::vector<int>& predicted, const std::vector<bool>& observed_positive) {
    if (predicted.size() != observed_positive.size()) {
        throw MetricError("pu_score: length mismatch");
    }
    std::size_t n_pos = 0, n_pred_pos = 0, n_hit = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (observed_positive[i]) ++n_pos;
        if (predicted[i] > 0) {
            ++n_pred_pos;
            if (observed_positive[i]) ++n_hit;
        }
    }
    if (n_pos == 0) throw MetricError("pu_score: no observed positives in fold");
    if (n_pred_pos == 0) return 0.0;
    const double recall = static_cast<double>(n_hit) / static_cast<double>(n_pos);
    const double pr_pred = static_cast<double>(n_pred_pos) / static_cast<double>(predicted.size());
    return recall * recall / pr_pred;
}

MeanCi mean_ci95(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) throw MetricError("mean_ci95: need at least 2 values");
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                        static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    const double hw = boost::math::quantile(dist, 0.975) * sd / std::sqrt(static_cast<double>(n));
    return MeanCi{mean, mean - hw, mean + hw};
}

double wilcoxon_signed_rank_one_tailed(const std::vector<double>& a,
                                       const std::vector<double>& b) {
    if (a.size() != b.size()) throw MetricError("wilcoxon: length mismatch");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    const std::size_t n = diffs.size();
    if (n == 0) throw MetricError("wilcoxon: all differences zero");
    if (n < 5) throw MetricError("wilcoxon: need at least 5 nonzero differences");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return std::fabs(diffs[i]) < std::fabs(diffs[j]);
    });

    // Doubled midranks stay integral under ties: block [s, e] of equal
    // magnitudes gets 2*rank = s + e + 2 in 1-based terms.
    std::vector<std::size_t> rank2(n);
    std::vector<std::size_t> tie_sizes;
    std::size_t s = 0;
    while (s < n) {
        std::size_t e = s;
        while (e + 1 < n && std::fabs(diffs[order[e + 1]]) == std::fabs(diffs[order[s]])) ++e;
        for (std::size_t k = s; k <= e; ++k) rank2[order[k]] = s + e + 2;
        tie_sizes.push_back(e - s + 1);
        s = e + 1;
    }

    std::size_t w2_pos = 0; // doubled signed-rank sum of positive differences
    for (std::size_t i = 0; i < n; ++i) {
        if (diffs[i] > 0.0) w2_pos += rank2[i];
    }

    if (n <= 25) {
        // Exact tail: polynomial coefficients of prod (1 + x^{rank2_i})
        // count the sign assignments reaching each doubled sum.
        const std::size_t s2 = n * (n + 1);
        std::vector<std::uint64_t> count(s2 + 1, 0);
        count[0] = 1;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t w = s2 + 1; w-- > rank2[i];) {
                count[w] += count[w - rank2[i]];
            }
        }
        std::uint64_t tail = 0;
        for (std::size_t w = w2_pos; w <= s2; ++w) tail += count[w];
        return static_cast<double>(tail) / std::ldexp(1.0, static_cast<int>(n));
    }

    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    double variance = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
    for (std::size_t t : tie_sizes) {
        const double td = static_cast<double>(t);
        variance -= (td * td * td - td) / 48.0;
    }
    const double w_pos = static_cast<double>(w2_pos) / 2.0;
    const double z = (w_pos - mean - 0.5) / std::sqrt(variance);
    const boost::math::normal norm;
    return boost::math::cdf(boost::math::complement(norm, z));
}

void write_curve_csv(const Curve& curve, std::ostream& out) {
    out << "x,y\n";
    char buf[80];
    for (const CurvePoint& pt : curve.points) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", pt.x, pt.y);
        out << buf;
    }
}

} // namespace puforge
