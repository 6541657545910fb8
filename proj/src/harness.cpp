#include "puforge/harness.hpp"

#include "puforge/parallel.hpp"
#include "puforge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace fs = std::filesystem;

namespace puforge {

namespace {

KernelSpec tuple_kernel(const ExperimentConfig& config, const ParamTuple& tuple) {
    if (config.kernel == KernelSpec::Kind::Linear) return KernelSpec::linear();
    return KernelSpec::rbf(tuple.back()); // gamma is always the last axis
}

std::size_t resolve_count(double fraction, std::size_t base) {
    const auto n = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(base) + 0.5));
    return std::max<std::size_t>(1, n);
}

// Labels for the held-out instances under one hyperparameter tuple. The
// CWSVM baseline thresholds its raw decision value at 0; the ensembles use
// their majority threshold 0.5.
std::vector<int> fold_predict(const ExperimentConfig& config, Method method,
                              const ParamTuple& tuple, const std::vector<Instance>& train_p,
                              const std::vector<Instance>& train_u,
                              const std::vector<Instance>& heldout, std::uint64_t seed) {
    std::vector<int> labels(heldout.size());
    switch (method) {
        case Method::Cwsvm: {
            CwsvmParams params;
            params.c_p = tuple[0];
            params.c_u = tuple[1];
            params.kernel = tuple_kernel(config, tuple);
            const CwsvmModel model = train_cwsvm(train_p, train_u, params);
            for (std::size_t i = 0; i < heldout.size(); ++i) {
                labels[i] = model.decision_value(heldout[i]) > 0.0 ? +1 : -1;
            }
            break;
        }
        case Method::Bagging: {
            BaggingParams params;
            params.n_models = config.n_models;
            params.c_u = tuple[0];
            params.n_u = resolve_count(tuple[1], train_u.size());
            params.kernel = tuple_kernel(config, tuple);
            params.seed = seed;
            const EnsembleModel model = train_bagging(train_p, train_u, params);
            for (std::size_t i = 0; i < heldout.size(); ++i) {
                labels[i] = model.predict_label(heldout[i]);
            }
            break;
        }
        case Method::Resvm: {
            ResvmParams params;
            params.n_models = config.n_models;
            params.c_u = tuple[0];
            params.w_pos = tuple[1];
            params.n_pos = resolve_count(tuple[2], train_p.size());
            params.n_unl = resolve_count(tuple[3] * static_cast<double>(params.n_pos), 1);
            params.kernel = tuple_kernel(config, tuple);
            params.seed = seed;
            const EnsembleModel model = train_resvm(train_p, train_u, params);
            for (std::size_t i = 0; i < heldout.size(); ++i) {
                labels[i] = model.predict_label(heldout[i]);
            }
            break;
        }
    }
    return labels;
}

// Decision values over the test set for the final, full-training-set model.
std::vector<double> final_decision_values(const ExperimentConfig& config, Method method,
                                          const ParamTuple& tuple,
                                          const std::vector<Instance>& train_p,
                                          const std::vector<Instance>& train_u,
                                          const std::vector<Instance>& test, std::uint64_t seed,
                                          int workers) {
    switch (method) {
        case Method::Cwsvm: {
            CwsvmParams params;
            params.c_p = tuple[0];
            params.c_u = tuple[1];
            params.kernel = tuple_kernel(config, tuple);
            return decision_values(train_cwsvm(train_p, train_u, params), test, workers);
        }
        case Method::Bagging: {
            BaggingParams params;
            params.n_models = config.n_models;
            params.c_u = tuple[0];
            params.n_u = resolve_count(tuple[1], train_u.size());
            params.kernel = tuple_kernel(config, tuple);
            params.seed = seed;
            return decision_values(train_bagging(train_p, train_u, params, workers), test,
                                   workers);
        }
        case Method::Resvm: {
            ResvmParams params;
            params.n_models = config.n_models;
            params.c_u = tuple[0];
            params.w_pos = tuple[1];
            params.n_pos = resolve_count(tuple[2], train_p.size());
            params.n_unl = resolve_count(tuple[3] * static_cast<double>(params.n_pos), 1);
            params.kernel = tuple_kernel(config, tuple);
            params.seed = seed;
            return decision_values(train_resvm(train_p, train_u, params, workers), test,
                                   workers);
        }
    }
    return {};
}

Dataset build_synthetic_source(const ExperimentConfig& config, std::uint64_t seed) {
    const std::size_t extra_pos = contamination_count(config.rate_u(), config.train_unl);
    const std::size_t extra_neg = contamination_count(config.rate_p(), config.train_pos);
    return generate_synthetic(config.train_pos + config.test_pos + extra_pos,
                              config.train_unl + config.test_neg + extra_neg, seed);
}

} // namespace

std::string MethodResult::params_string() const {
    std::string out;
    char buf[64];
    for (std::size_t a = 0; a < best_tuple.size(); ++a) {
        std::snprintf(buf, sizeof(buf), "%s%s=%.9g", a ? ";" : "", axis_names[a].c_str(),
                      best_tuple[a]);
        out += buf;
    }
    return out;
}

SearchSpace method_search_space(const ExperimentConfig& config, Method method) {
    SearchSpace space;
    space.budget = config.random_budget;
    auto axis = [](std::string name, std::vector<double> grid,
                   std::pair<double, double> box) {
        ParamAxis a;
        a.name = std::move(name);
        a.grid = std::move(grid);
        a.lo = box.first;
        a.hi = box.second;
        return a;
    };
    switch (method) {
        case Method::Cwsvm:
            space.axes.push_back(axis("c_p", config.grid_c_p, config.box_c_p));
            space.axes.push_back(axis("c_u", config.grid_c_u, config.box_c_u));
            break;
        case Method::Bagging:
            space.axes.push_back(axis("c_u", config.grid_c_u, config.box_c_u));
            space.axes.push_back(axis("n_u_frac", config.grid_n_u_frac, config.box_n_u_frac));
            break;
        case Method::Resvm:
            space.axes.push_back(axis("c_u", config.grid_c_u, config.box_c_u));
            space.axes.push_back(axis("w_pos", config.grid_w_pos, config.box_w_pos));
            space.axes.push_back(
                axis("n_pos_frac", config.grid_n_pos_frac, config.box_n_pos_frac));
            space.axes.push_back(
                axis("n_unl_ratio", config.grid_n_unl_ratio, config.box_n_unl_ratio));
            break;
    }
    if (config.kernel == KernelSpec::Kind::Rbf) {
        space.axes.push_back(axis("gamma", config.grid_gamma, config.box_gamma));
    }
    return space;
}

std::vector<MethodResult> run_iteration(const ExperimentConfig& config, std::size_t rep_index,
                                        const Dataset* file_source) {
    const std::uint64_t rep_seed = derive_seed(config.seed, SeedStage::Repetition, rep_index);

    Dataset generated;
    const Dataset* source = file_source;
    if (!source) {
        generated = build_synthetic_source(config, derive_seed(rep_seed, SeedStage::DataGen));
        source = &generated;
    }

    const SubsampleResult split =
        subsample_split(*source, config.train_pos, config.train_unl, config.test_pos,
                        config.test_neg, derive_seed(rep_seed, SeedStage::Split));
    ContaminationSpec contamination;
    contamination.rate_p = config.rate_p();
    contamination.rate_u = config.rate_u();
    contamination.seed = derive_seed(rep_seed, SeedStage::Contaminate);
    const Dataset train = contaminate(split.train, split.leftover, contamination);

    // one fold plan, shared by every method
    const FoldPlan plan = make_folds(train, config.k_folds, derive_seed(rep_seed, SeedStage::Folds));

    const std::vector<Instance> train_p = train.positives();
    const std::vector<Instance> train_u = train.unlabeled();
    const std::vector<Instance>& test = split.test.instances();
    std::vector<int> test_truth(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        test_truth[i] = test[i].true_label() == Label::Positive ? +1 : -1;
    }

    std::vector<MethodResult> results;
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
        const Method method = config.methods[m];
        const std::uint64_t search_seed = derive_seed(rep_seed, SeedStage::Search, m);
        const SearchSpace space = method_search_space(config, method);

        TupleScorer scorer = [&](const ParamTuple& tuple, std::size_t tuple_id) {
            FoldTrainer trainer = [&](const std::vector<Instance>& fold_p,
                                      const std::vector<Instance>& fold_u,
                                      const std::vector<Instance>& heldout, std::size_t fold) {
                return fold_predict(config, method, tuple, fold_p, fold_u, heldout,
                                    derive_seed(search_seed, tuple_id, fold));
            };
            return cross_val_scores(trainer, plan, train, 1);
        };

        const SearchResult found =
            search(space, scorer, config.search_mode, search_seed, config.workers);

        const std::vector<double> scores = final_decision_values(
            config, method, found.best, train_p, train_u, test,
            derive_seed(rep_seed, SeedStage::FinalTrain, m), config.workers);

        std::vector<ScoredLabel> scored(test.size());
        for (std::size_t i = 0; i < test.size(); ++i) {
            scored[i] = ScoredLabel{scores[i], test_truth[i]};
        }

        MethodResult result;
        result.method = method;
        result.best_tuple = found.best;
        result.axis_names = found.axis_names;
        result.boundary = found.on_boundary;
        result.pr = pr_curve(scored);
        result.roc = roc_curve(scored);
        result.auc_pr = auc(result.pr);
        result.auc_roc = auc(result.roc);
        results.push_back(std::move(result));
    }
    return results;
}

namespace {

std::string rep_file(const std::string& out_dir, std::size_t rep) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "rep%03zu.csv", rep);
    return out_dir + "/reps/" + buf;
}

std::string curve_file(const std::string& out_dir, std::size_t rep, Method method,
                       const char* kind) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "rep%03zu_%s_%s.csv", rep, method_name(method), kind);
    return out_dir + "/curves/" + buf;
}

bool parse_rep_file(const std::string& path, const ExperimentConfig& config, std::size_t rep,
                    std::vector<RepetitionRecord>& out) {
    std::ifstream in(path);
    if (!in) return false;
    std::string header;
    if (!std::getline(in, header) || header != "rep,method,auc_pr,auc_roc,boundary,params") {
        return false;
    }
    std::vector<RepetitionRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        RepetitionRecord r;
        try {
            std::getline(ls, field, ',');
            r.rep = std::stoul(field);
            std::getline(ls, field, ',');
            bool known = false;
            for (Method m : {Method::Cwsvm, Method::Bagging, Method::Resvm}) {
                if (field == method_name(m)) {
                    r.method = m;
                    known = true;
                }
            }
            if (!known) return false;
            std::getline(ls, field, ',');
            r.auc_pr = std::stod(field);
            std::getline(ls, field, ',');
            r.auc_roc = std::stod(field);
            std::getline(ls, field, ',');
            r.boundary = field == "1";
            std::getline(ls, r.params);
        } catch (const std::exception&) {
            return false;
        }
        if (r.rep != rep) return false;
        records.push_back(std::move(r));
    }
    // must cover exactly the configured methods, in order
    if (records.size() != config.methods.size()) return false;
    for (std::size_t m = 0; m < records.size(); ++m) {
        if (records[m].method != config.methods[m]) return false;
    }
    out.insert(out.end(), records.begin(), records.end());
    return true;
}

void write_rep_file(const std::string& path, const std::vector<RepetitionRecord>& records) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        out << "rep,method,auc_pr,auc_roc,boundary,params\n";
        char buf[96];
        for (const RepetitionRecord& r : records) {
            std::snprintf(buf, sizeof(buf), "%zu,%s,%.17g,%.17g,%d,", r.rep,
                          method_name(r.method), r.auc_pr, r.auc_roc, r.boundary ? 1 : 0);
            out << buf << r.params << "\n";
        }
    }
    fs::rename(tmp, path);
}

constexpr Method kCanonicalOrder[] = {Method::Cwsvm, Method::Bagging, Method::Resvm};

} // namespace

RunResult run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
    config.validate();
    fs::create_directories(out_dir + "/reps");
    fs::create_directories(out_dir + "/curves");
    {
        std::ofstream snapshot(out_dir + "/config.txt");
        write_config(config, snapshot);
    }

    Dataset file_data;
    const Dataset* source = nullptr;
    if (config.dataset != "synthetic") {
        const double positive = config.positive_label;
        file_data = parse_sparse_file_path(config.dataset,
                                           [positive](double label) { return label == positive; });
        source = &file_data;
    }

    RunResult result;
    for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
        const std::string path = rep_file(out_dir, rep);
        if (parse_rep_file(path, config, rep, result.repetitions)) continue; // resume
        try {
            const auto method_results = run_iteration(config, rep, source);
            std::vector<RepetitionRecord> records;
            for (const MethodResult& mr : method_results) {
                std::ofstream pr_out(curve_file(out_dir, rep, mr.method, "pr"));
                write_curve_csv(mr.pr, pr_out);
                std::ofstream roc_out(curve_file(out_dir, rep, mr.method, "roc"));
                write_curve_csv(mr.roc, roc_out);
                RepetitionRecord r;
                r.rep = rep;
                r.method = mr.method;
                r.auc_pr = mr.auc_pr;
                r.auc_roc = mr.auc_roc;
                r.boundary = mr.boundary;
                r.params = mr.params_string();
                records.push_back(std::move(r));
            }
            write_rep_file(path, records);
            result.repetitions.insert(result.repetitions.end(), records.begin(), records.end());
        } catch (const std::exception& e) {
            result.failures.push_back("rep " + std::to_string(rep) + ": " + e.what());
        }
    }

    // win per repetition: best test AUC-PR, ties to the first method in
    // canonical order
    for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
        RepetitionRecord* best = nullptr;
        bool tie = false;
        for (Method m : kCanonicalOrder) {
            for (RepetitionRecord& r : result.repetitions) {
                if (r.rep != rep || r.method != m) continue;
                if (!best || r.auc_pr > best->auc_pr) {
                    best = &r;
                    tie = false;
                } else if (r.auc_pr == best->auc_pr) {
                    tie = true;
                }
            }
        }
        if (best) {
            best->win = true;
            if (tie) {
                for (RepetitionRecord& r : result.repetitions) {
                    if (r.rep == rep) r.tie = true;
                }
            }
        }
    }

    for (Method m : kCanonicalOrder) {
        if (std::find(config.methods.begin(), config.methods.end(), m) == config.methods.end()) {
            continue;
        }
        MethodSummary summary;
        summary.method = m;
        std::vector<double> pr_values, roc_values;
        for (const RepetitionRecord& r : result.repetitions) {
            if (r.method != m) continue;
            pr_values.push_back(r.auc_pr);
            roc_values.push_back(r.auc_roc);
            if (r.win) ++summary.wins;
        }
        if (pr_values.size() >= 2) {
            summary.auc_pr_ci = mean_ci95(pr_values);
            summary.auc_roc_ci = mean_ci95(roc_values);
        } else if (pr_values.size() == 1) {
            summary.auc_pr_ci = MeanCi{pr_values[0], pr_values[0], pr_values[0]};
            summary.auc_roc_ci = MeanCi{roc_values[0], roc_values[0], roc_values[0]};
        }
        result.summaries.push_back(summary);
    }

    const bool has_resvm = std::find(config.methods.begin(), config.methods.end(),
                                     Method::Resvm) != config.methods.end();
    const bool has_bagging = std::find(config.methods.begin(), config.methods.end(),
                                       Method::Bagging) != config.methods.end();
    if (has_resvm && has_bagging) {
        std::vector<double> resvm_auc, bagging_auc;
        for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
            const RepetitionRecord* rr = nullptr;
            const RepetitionRecord* br = nullptr;
            for (const RepetitionRecord& r : result.repetitions) {
                if (r.rep != rep) continue;
                if (r.method == Method::Resvm) rr = &r;
                if (r.method == Method::Bagging) br = &r;
            }
            if (rr && br) {
                resvm_auc.push_back(rr->auc_pr);
                bagging_auc.push_back(br->auc_pr);
            }
        }
        try {
            result.wilcoxon_resvm_gt_bagging =
                wilcoxon_signed_rank_one_tailed(resvm_auc, bagging_auc);
        } catch (const MetricError&) {
            // too few informative pairs; leave unset
        }
    }

    result.failed = 4 * result.failures.size() > config.repetitions;

    {
        std::ofstream out(out_dir + "/repetitions.csv");
        write_repetitions_csv(result, out);
    }
    {
        std::ofstream out(out_dir + "/summary.csv");
        write_summary_csv(result, out);
    }
    return result;
}

std::vector<SweepRow> contamination_sweep(const ExperimentConfig& config, char axis,
                                          const std::vector<double>& levels,
                                          const std::string& out_dir) {
    if (axis != 'P' && axis != 'U') throw ConfigError("sweep axis must be P or U");
    fs::create_directories(out_dir);
    std::vector<SweepRow> rows;
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const double level = levels[li];
        if (level < 0.0 || level >= 0.5) throw ConfigError("sweep level outside [0, 0.5)");
        ExperimentConfig level_config = config;
        if (axis == 'U') {
            level_config.override_rate_p = config.contamination;
            level_config.override_rate_u = level;
        } else {
            level_config.override_rate_p = level;
            level_config.override_rate_u = config.contamination;
        }
        level_config.seed = derive_seed(config.seed, SeedStage::Sweep, li);
        char sub[32];
        std::snprintf(sub, sizeof(sub), "/level%02zu", li);
        const RunResult run = run_experiment(level_config, out_dir + sub);
        if (run.failed) {
            throw ExperimentError("sweep level " + std::to_string(level) + " failed");
        }
        SweepRow row;
        row.level = level;
        for (const MethodSummary& s : run.summaries) {
            row.auc_pr.emplace_back(s.method, s.auc_pr_ci);
        }
        rows.push_back(std::move(row));
    }
    std::ofstream out(out_dir + "/sweep.csv");
    write_sweep_csv(rows, out);
    return rows;
}

std::vector<StudyRow> resample_contamination_study(double rate,
                                                   const std::vector<std::size_t>& sizes,
                                                   std::size_t trials, std::uint64_t seed,
                                                   std::size_t source_size) {
    if (rate < 0.0 || rate >= 0.5) throw DataError("study rate must lie in [0, 0.5)");
    if (trials < 1) throw DataError("study needs at least one trial");
    const std::size_t contaminated = contamination_count(rate, source_size);

    std::vector<StudyRow> rows;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const std::size_t size = sizes[si];
        const std::uint64_t size_seed = derive_seed(seed, SeedStage::Study, si);
        std::vector<double> fractions(trials);
        for (std::size_t t = 0; t < trials; ++t) {
            const auto draws = bootstrap_indices(source_size, size, derive_seed(size_seed, t));
            std::size_t hits = 0;
            for (std::uint32_t d : draws) {
                if (d < contaminated) ++hits;
            }
            fractions[t] = static_cast<double>(hits) / static_cast<double>(size);
        }
        std::sort(fractions.begin(), fractions.end());
        auto quantile = [&](double q) {
            const double pos = q * static_cast<double>(trials - 1);
            const std::size_t lo = static_cast<std::size_t>(pos);
            const std::size_t hi = std::min(lo + 1, trials - 1);
            const double w = pos - static_cast<double>(lo);
            return fractions[lo] * (1.0 - w) + fractions[hi] * w;
        };
        StudyRow row;
        row.size = size;
        row.mean = std::accumulate(fractions.begin(), fractions.end(), 0.0) /
                   static_cast<double>(trials);
        row.ci_lo = quantile(0.025);
        row.ci_hi = quantile(0.975);
        rows.push_back(row);
    }
    return rows;
}

void write_repetitions_csv(const RunResult& result, std::ostream& out) {
    out << "rep,method,auc_pr,auc_roc,win,tie,boundary,params\n";
    char buf[96];
    for (const RepetitionRecord& r : result.repetitions) {
        std::snprintf(buf, sizeof(buf), "%zu,%s,%.17g,%.17g,%d,%d,%d,", r.rep,
                      method_name(r.method), r.auc_pr, r.auc_roc, r.win ? 1 : 0, r.tie ? 1 : 0,
                      r.boundary ? 1 : 0);
        out << buf << r.params << "\n";
    }
}

void write_summary_csv(const RunResult& result, std::ostream& out) {
    out << "method,mean_auc_pr,auc_pr_lo,auc_pr_hi,mean_auc_roc,auc_roc_lo,auc_roc_hi,wins\n";
    char buf[256];
    for (const MethodSummary& s : result.summaries) {
        std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%zu\n",
                      method_name(s.method), s.auc_pr_ci.mean, s.auc_pr_ci.lo, s.auc_pr_ci.hi,
                      s.auc_roc_ci.mean, s.auc_roc_ci.lo, s.auc_roc_ci.hi, s.wins);
        out << buf;
    }
    if (result.wilcoxon_resvm_gt_bagging) {
        std::snprintf(buf, sizeof(buf), "wilcoxon_resvm_gt_bagging,%.9g\n",
                      *result.wilcoxon_resvm_gt_bagging);
        out << buf;
    }
    out << "failed_repetitions," << result.failures.size() << "\n";
}

void write_study_csv(const std::vector<StudyRow>& rows, std::ostream& out) {
    out << "size,mean,ci_lo,ci_hi\n";
    char buf[128];
    for (const StudyRow& row : rows) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g\n", row.size, row.mean, row.ci_lo,
                      row.ci_hi);
        out << buf;
    }
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "level,method,mean_auc_pr,ci_lo,ci_hi\n";
    char buf[160];
    for (const SweepRow& row : rows) {
        for (const auto& [method, ci] : row.auc_pr) {
            std::snprintf(buf, sizeof(buf), "%.9g,%s,%.9g,%.9g,%.9g\n", row.level,
                          method_name(method), ci.mean, ci.lo, ci.hi);
            out << buf;
        }
    }
}

} // namespace puforge
