// Command-line front end: run experiments, sweep contamination levels,
// replicate the resample-contamination study, tune a single method, or apply
// a serialized model to a sparse file.

#include "puforge/config.hpp"
#include "puforge/harness.hpp"
#include "puforge/rng.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitExperiment = 2;

puforge::ExperimentConfig load_config(const std::string& path,
                                      const std::optional<std::uint64_t>& seed,
                                      const std::optional<int>& workers) {
    puforge::ExperimentConfig config = puforge::parse_config_file(path);
    if (seed) config.seed = *seed;
    if (workers) config.workers = *workers;
    return config;
}

void print_summary(const puforge::RunResult& result) {
    for (const puforge::MethodSummary& s : result.summaries) {
        std::printf("%-8s mean AUC-PR %.4f [%.4f, %.4f]  AUC-ROC %.4f  wins %zu\n",
                    puforge::method_name(s.method), s.auc_pr_ci.mean, s.auc_pr_ci.lo,
                    s.auc_pr_ci.hi, s.auc_roc_ci.mean, s.wins);
    }
    if (result.wilcoxon_resvm_gt_bagging) {
        std::printf("wilcoxon p(RESVM > bagging) = %.3g\n", *result.wilcoxon_resvm_gt_bagging);
    }
    for (const std::string& failure : result.failures) {
        std::fprintf(stderr, "failed: %s\n", failure.c_str());
    }
}

std::vector<double> parse_levels(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PU learning benchmark harness (class-weighted SVM, bagging SVM, RESVM)"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "puforge-out";
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config_path, "experiment config file");
        if (needs_config) opt->required();
        cmd->add_option("--seed", seed, "override the master seed");
        cmd->add_option("--workers", workers, "worker threads (0 = all cores)");
        cmd->add_option("--out", out_dir, "output directory");
    };

    auto* run_cmd = app.add_subcommand("run", "run a full experiment from a config");
    add_common(run_cmd, true);

    auto* sweep_cmd = app.add_subcommand("sweep", "vary contamination on one axis");
    add_common(sweep_cmd, true);
    std::string axis = "U", levels_csv = "0,0.1,0.2,0.3,0.4";
    sweep_cmd->add_option("--axis", axis, "axis to vary: P or U")
        ->check(CLI::IsMember({"P", "U"}));
    sweep_cmd->add_option("--levels", levels_csv, "comma-separated contamination levels");

    auto* study_cmd =
        app.add_subcommand("contamination-study", "bootstrap resample contamination spread");
    add_common(study_cmd, false);
    double study_rate = 0.1;
    std::string sizes_csv = "10,50,100,500,1000,5000";
    std::size_t trials = 20000, source_size = 1000;
    study_cmd->add_option("--rate", study_rate, "source contamination rate");
    study_cmd->add_option("--sizes", sizes_csv, "comma-separated resample sizes");
    study_cmd->add_option("--trials", trials, "resamples per size");
    study_cmd->add_option("--source-size", source_size, "size of the resampled source set");

    auto* tune_cmd = app.add_subcommand("tune", "hyperparameter search only (repetition 0)");
    add_common(tune_cmd, true);
    std::string tune_method;
    tune_cmd->add_option("--method", tune_method, "restrict to one method");

    auto* predict_cmd = app.add_subcommand("predict", "decision values for a sparse data file");
    std::string model_path, data_path, predict_out = "-";
    predict_cmd->add_option("--model", model_path, "serialized model file")->required();
    predict_cmd->add_option("--data", data_path, "sparse data file")->required();
    predict_cmd->add_option("--out", predict_out, "output path ('-' = stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (run_cmd->parsed()) {
            const auto config = load_config(config_path, seed, workers);
            const puforge::RunResult result = puforge::run_experiment(config, out_dir);
            print_summary(result);
            return result.failed ? kExitExperiment : kExitOk;
        }

        if (sweep_cmd->parsed()) {
            auto config = load_config(config_path, seed, workers);
            const auto rows =
                puforge::contamination_sweep(config, axis[0], parse_levels(levels_csv), out_dir);
            for (const puforge::SweepRow& row : rows) {
                std::printf("level %.2f:", row.level);
                for (const auto& [method, ci] : row.auc_pr) {
                    std::printf("  %s %.4f [%.4f, %.4f]", puforge::method_name(method), ci.mean,
                                ci.lo, ci.hi);
                }
                std::printf("\n");
            }
            return kExitOk;
        }

        if (study_cmd->parsed()) {
            std::vector<std::size_t> sizes;
            for (double v : parse_levels(sizes_csv)) sizes.push_back(static_cast<std::size_t>(v));
            const auto rows = puforge::resample_contamination_study(
                study_rate, sizes, trials, seed.value_or(42), source_size);
            std::filesystem::create_directories(out_dir);
            std::ofstream out(out_dir + "/study.csv");
            puforge::write_study_csv(rows, out);
            for (const puforge::StudyRow& row : rows) {
                std::printf("size %5zu  mean %.4f  ci [%.4f, %.4f]\n", row.size, row.mean,
                            row.ci_lo, row.ci_hi);
            }
            return kExitOk;
        }

        if (tune_cmd->parsed()) {
            auto config = load_config(config_path, seed, workers);
            if (!tune_method.empty()) {
                std::ostringstream methods;
                methods << "methods = " << tune_method;
                std::istringstream in(methods.str());
                // reuse the config parser for the method-name validation
                auto restricted = puforge::parse_config(in);
                config.methods = restricted.methods;
            }
            config.validate();
            config.repetitions = 1;
            const auto results = puforge::run_iteration(config, 0);
            std::filesystem::create_directories(out_dir);
            for (const puforge::MethodResult& r : results) {
                std::printf("%-8s best %s  (test AUC-PR %.4f)%s\n",
                            puforge::method_name(r.method), r.params_string().c_str(), r.auc_pr,
                            r.boundary ? "  [on search boundary]" : "");
            }
            return kExitOk;
        }

        if (predict_cmd->parsed()) {
            std::ifstream model_in(model_path);
            if (!model_in) throw puforge::ConfigError("cannot open model file: " + model_path);
            std::string first_line;
            std::getline(model_in, first_line);
            model_in.seekg(0);

            const puforge::Dataset data = puforge::parse_sparse_file_path(data_path);
            std::vector<double> values;
            if (first_line == "puforge-ensemble-v1") {
                const auto model = puforge::EnsembleModel::load(model_in);
                values = puforge::decision_values(model, data.instances(), workers.value_or(1));
            } else if (first_line == "puforge-cwsvm-v1") {
                const auto model = puforge::CwsvmModel::load(model_in);
                values = puforge::decision_values(model, data.instances(), workers.value_or(1));
            } else {
                throw puforge::ConfigError("unrecognized model header: " + first_line);
            }

            std::ofstream file_out;
            std::ostream* out = &std::cout;
            if (predict_out != "-") {
                file_out.open(predict_out);
                if (!file_out) {
                    throw puforge::ConfigError("cannot open output file: " + predict_out);
                }
                out = &file_out;
            }
            char buf[48];
            for (double v : values) {
                std::snprintf(buf, sizeof(buf), "%.9g\n", v);
                *out << buf;
            }
            return kExitOk;
        }
    } catch (const puforge::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const puforge::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "experiment failed: %s\n", e.what());
        return kExitExperiment;
    }
    return kExitUsage;
}
