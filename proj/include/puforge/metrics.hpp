#ifndef PUFORGE_METRICS_HPP
#define PUFORGE_METRICS_HPP

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace puforge {

struct MetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScoredLabel {
    double score;
    int truth; // +1 / -1
};

struct CurvePoint {
    double x;
    double y;
};

struct Curve {
    enum class Kind { PR, ROC };
    Kind kind;
    std::vector<CurvePoint> points;
    std::size_t total_pos = 0;
    std::size_t total_neg = 0;
    // cumulative counts behind each point; kept so auc() can interpolate in
    // count space without reconstructing from rounded ratios
    std::vector<std::size_t> tp;
    std::vector<std::size_t> fp;
};

// One (recall, precision) point per distinct score threshold, descending;
// tied scores collapse into one operating point.
Curve pr_curve(const std::vector<ScoredLabel>& scored);

// One (FPR, TPR) point per distinct threshold, with the (0,0) anchor.
Curve roc_curve(const std::vector<ScoredLabel>& scored);

// ROC: trapezoidal. PR: the curve between adjacent operating points is
// interpolated in TP/FP counts (precision is hyperbolic there, and linear
// interpolation in PR space would overestimate); area accumulated with unit
// TP steps from the (TP,FP) = (0,0) anchor.
double auc(const Curve& curve);

// recall^2 / Pr(predicted positive), recall over the observed positives.
// A classifier that predicts nothing positive scores 0 so grid search can
// still rank it.
double pu_score(const std::vector<int>& predicted, const std::vector<bool>& observed_positive);

struct MeanCi {
    double mean;
    double lo;
    double hi;
};

// mean +- t_{0.975, n-1} * sd / sqrt(n)
MeanCi mean_ci95(const std::vector<double>& values);

// Paired one-tailed test of median(a - b) > 0. Zero differences are
// dropped; ties get midranks. Exact distribution (via the signed-rank sum
// DP over doubled ranks) for n <= 25, normal approximation with tie and
// continuity correction above.
double wilcoxon_signed_rank_one_tailed(const std::vector<double>& a,
                                       const std::vector<double>& b);

// CSV export, header "x,y", 9 significant digits.
void write_curve_csv(const Curve& curve, std::ostream& out);

} // namespace puforge

#endif
