#ifndef PUFORGE_HARNESS_HPP
#define PUFORGE_HARNESS_HPP

#include "puforge/config.hpp"
#include "puforge/dataset.hpp"
#include "puforge/ensemble.hpp"
#include "puforge/metrics.hpp"
#include "puforge/tuning.hpp"

#include <optional>
#include <string>
#include <vector>

namespace puforge {

struct ExperimentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MethodResult {
    Method method;
    ParamTuple best_tuple;
    std::vector<std::string> axis_names;
    bool boundary = false; // best tuple sat on the search-space edge
    double auc_pr = 0.0;
    double auc_roc = 0.0;
    Curve pr;
    Curve roc;

    std::string params_string() const;
};

struct RepetitionRecord {
    std::size_t rep;
    Method method;
    double auc_pr;
    double auc_roc;
    bool boundary;
    bool win = false;
    bool tie = false;
    std::string params;
};

struct MethodSummary {
    Method method;
    MeanCi auc_pr_ci{0, 0, 0};
    MeanCi auc_roc_ci{0, 0, 0};
    std::size_t wins = 0;
};

struct RunResult {
    std::vector<RepetitionRecord> repetitions;
    std::vector<MethodSummary> summaries;
    std::optional<double> wilcoxon_resvm_gt_bagging;
    std::vector<std::string> failures; // "rep N: reason"
    bool failed = false;               // more than 25% of repetitions aborted
};

// Search space for one method under this config; |P| and |U| resolve the
// fraction axes at train time, so the same space serves folds and the full
// training set.
SearchSpace method_search_space(const ExperimentConfig& config, Method method);

// One benchmark iteration: build the training set (subsample + contaminate
// with repetition-derived seeds), share one fold plan across every method,
// tune by mean pu_score, retrain each method on the full training set with
// its best tuple and score the held-out test set by true labels.
std::vector<MethodResult> run_iteration(const ExperimentConfig& config, std::size_t rep_index,
                                        const Dataset* file_source = nullptr);

// Runs all repetitions, persists per-repetition CSVs and curves under
// out_dir (reusing finished repetitions on rerun), and aggregates CIs, win
// counts and the RESVM-vs-bagging Wilcoxon test.
RunResult run_experiment(const ExperimentConfig& config, const std::string& out_dir);

struct SweepRow {
    double level;
    std::vector<std::pair<Method, MeanCi>> auc_pr;
};

// Fixes contamination on one side of the training set at config.contamination
// and varies the other; one full experiment per level.
std::vector<SweepRow> contamination_sweep(const ExperimentConfig& config, char axis,
                                          const std::vector<double>& levels,
                                          const std::string& out_dir);

struct StudyRow {
    std::size_t size;
    double mean;
    double ci_lo; // 2.5% quantile of resample contamination
    double ci_hi; // 97.5% quantile
};

// Empirical distribution of bootstrap-resample contamination: mean stays at
// the source rate while the spread shrinks with resample size.
std::vector<StudyRow> resample_contamination_study(double rate,
                                                   const std::vector<std::size_t>& sizes,
                                                   std::size_t trials, std::uint64_t seed,
                                                   std::size_t source_size = 1000);

void write_summary_csv(const RunResult& result, std::ostream& out);
void write_repetitions_csv(const RunResult& result, std::ostream& out);
void write_study_csv(const std::vector<StudyRow>& rows, std::ostream& out);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

} // namespace puforge

#endif
