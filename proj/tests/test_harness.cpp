#include "puforge/harness.hpp"

#include "puforge/rng.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace puforge;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig c = default_config();
    c.dataset = "synthetic";
    c.setting = Setting::Supervised;
    c.contamination = 0.0;
    c.train_pos = 20;
    c.train_unl = 40;
    c.test_pos = 100;
    c.test_neg = 100;
    c.repetitions = 2;
    c.k_folds = 4;
    c.n_models = 6;
    c.seed = 2024;
    c.grid_c_p = {1.0};
    c.grid_c_u = {1.0};
    c.grid_w_pos = {1.0, 2.0};
    c.grid_gamma = {0.5};
    c.grid_n_pos_frac = {0.5};
    c.grid_n_unl_ratio = {2.0};
    c.grid_n_u_frac = {0.5};
    return c;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

} // namespace

TEST_SUITE("harness") {

TEST_CASE("config files parse and the environment overrides them") {
    std::istringstream in("# comment\n"
                          "dataset = synthetic\n"
                          "setting = semisupervised\n"
                          "contamination = 0.3\n"
                          "train_pos = 50\n"
                          "methods = resvm,bagging\n"
                          "grid_c_u = 1,2,4\n"
                          "box_gamma = 0.1:4\n");
    ::setenv("PUFORGE_SEED", "777", 1);
    const ExperimentConfig c = parse_config(in);
    ::unsetenv("PUFORGE_SEED");

    CHECK(c.setting == Setting::SemiSupervised);
    CHECK(c.contamination == 0.3);
    CHECK(c.train_pos == 50);
    REQUIRE(c.methods.size() == 2);
    CHECK(c.methods[0] == Method::Resvm);
    CHECK(c.grid_c_u == std::vector<double>{1.0, 2.0, 4.0});
    CHECK(c.box_gamma.first == 0.1);
    CHECK(c.box_gamma.second == 4.0);
    CHECK(c.seed == 777); // env override
    CHECK(c.rate_p() == 0.3);
    CHECK(c.rate_u() == 0.3);
}

TEST_CASE("config validation enforces the setting/contamination coupling") {
    ExperimentConfig c = tiny_config();
    c.setting = Setting::Supervised;
    c.contamination = 0.2;
    CHECK_THROWS_AS(c.validate(), ConfigError);

    c = tiny_config();
    c.setting = Setting::PU;
    c.contamination = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);

    c = tiny_config();
    c.setting = Setting::PU;
    c.contamination = 0.2;
    CHECK_NOTHROW(c.validate());
    CHECK(c.rate_p() == 0.0);
    CHECK(c.rate_u() == 0.2);

    std::istringstream bad("unknown_key = 5\n");
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("config snapshot round-trips through the parser") {
    const ExperimentConfig c = tiny_config();
    std::ostringstream out;
    write_config(c, out);
    std::istringstream in(out.str());
    const ExperimentConfig back = parse_config(in);
    CHECK(back.train_pos == c.train_pos);
    CHECK(back.grid_w_pos == c.grid_w_pos);
    CHECK(back.seed == c.seed);
    CHECK(back.methods == c.methods);
}

TEST_CASE("method search spaces carry the configured axes") {
    const ExperimentConfig c = tiny_config();
    const SearchSpace resvm = method_search_space(c, Method::Resvm);
    REQUIRE(resvm.axes.size() == 5); // c_u, w_pos, n_pos_frac, n_unl_ratio, gamma
    CHECK(resvm.axes[0].name == "c_u");
    CHECK(resvm.axes[4].name == "gamma");

    ExperimentConfig linear = c;
    linear.kernel = KernelSpec::Kind::Linear;
    CHECK(method_search_space(linear, Method::Cwsvm).axes.size() == 2);
}

TEST_CASE("run_iteration is bit-reproducible for a fixed repetition index") {
    const ExperimentConfig c = tiny_config();
    const auto a = run_iteration(c, 1);
    const auto b = run_iteration(c, 1);
    REQUIRE(a.size() == 3);
    for (std::size_t m = 0; m < a.size(); ++m) {
        CHECK(a[m].auc_pr == b[m].auc_pr);
        CHECK(a[m].auc_roc == b[m].auc_roc);
        CHECK(a[m].best_tuple == b[m].best_tuple);
    }
    // different repetitions see different data
    const auto other = run_iteration(c, 0);
    CHECK(other[0].auc_pr != a[0].auc_pr);
}

TEST_CASE("run_experiment writes summaries, wins add up, outputs are deterministic") {
    const ExperimentConfig c = tiny_config();
    TempDir dir_a("puforge_test_run_a"), dir_b("puforge_test_run_b");

    const RunResult a = run_experiment(c, dir_a.str());
    CHECK_FALSE(a.failed);
    CHECK(a.failures.empty());
    REQUIRE(a.summaries.size() == 3);

    std::size_t wins = 0;
    for (const MethodSummary& s : a.summaries) wins += s.wins;
    CHECK(wins == c.repetitions);

    // win flags in the table reconstruct the summary counts
    for (const MethodSummary& s : a.summaries) {
        std::size_t counted = 0;
        for (const RepetitionRecord& r : a.repetitions) {
            if (r.method == s.method && r.win) ++counted;
        }
        CHECK(counted == s.wins);
    }

    CHECK(fs::exists(dir_a.path / "summary.csv"));
    CHECK(fs::exists(dir_a.path / "repetitions.csv"));
    CHECK(fs::exists(dir_a.path / "config.txt"));
    CHECK(fs::exists(dir_a.path / "curves/rep000_resvm_pr.csv"));

    ExperimentConfig c_workers = c;
    c_workers.workers = 4;
    run_experiment(c_workers, dir_b.str());
    CHECK(slurp(dir_a.str() + "/summary.csv") == slurp(dir_b.str() + "/summary.csv"));
    CHECK(slurp(dir_a.str() + "/repetitions.csv") == slurp(dir_b.str() + "/repetitions.csv"));
}

TEST_CASE("finished repetitions are reused on rerun") {
    ExperimentConfig c = tiny_config();
    c.repetitions = 1;
    TempDir dir("puforge_test_resume");

    run_experiment(c, dir.str());
    const std::string first_summary = slurp(dir.str() + "/summary.csv");

    // tamper with one value inside the persisted repetition, then rerun:
    // the stored result must be trusted as-is (no recomputation)
    const std::string rep_path = dir.str() + "/reps/rep000.csv";
    std::string contents = slurp(rep_path);
    const auto pos = contents.find("cwsvm,0.");
    REQUIRE(pos != std::string::npos);
    contents[pos + 8] = '1'; // nudge the stored auc_pr digit
    {
        std::ofstream out(rep_path);
        out << contents;
    }
    run_experiment(c, dir.str());
    CHECK(slurp(dir.str() + "/summary.csv") != first_summary);

    // a corrupted repetition file is recomputed from scratch
    {
        std::ofstream out(rep_path);
        out << "garbage\n";
    }
    run_experiment(c, dir.str());
    CHECK(slurp(dir.str() + "/summary.csv") == first_summary);
}

TEST_CASE("single-method experiments have no wilcoxon and win every repetition") {
    ExperimentConfig c = tiny_config();
    c.methods = {Method::Resvm};
    TempDir dir("puforge_test_single");
    const RunResult r = run_experiment(c, dir.str());
    CHECK_FALSE(r.wilcoxon_resvm_gt_bagging.has_value());
    REQUIRE(r.summaries.size() == 1);
    CHECK(r.summaries[0].wins == c.repetitions);
}

TEST_CASE("semi-supervised iterations keep train and test disjoint") {
    ExperimentConfig c = tiny_config();
    c.setting = Setting::SemiSupervised;
    c.contamination = 0.3;
    c.methods = {Method::Cwsvm};
    // run_iteration internally asserts nothing; verify through the data module
    const std::uint64_t rep_seed = derive_seed(c.seed, SeedStage::Repetition, 0);
    const Dataset source = generate_synthetic(
        c.train_pos + c.test_pos + contamination_count(0.3, c.train_unl),
        c.train_unl + c.test_neg + contamination_count(0.3, c.train_pos),
        derive_seed(rep_seed, SeedStage::DataGen));
    const SubsampleResult split =
        subsample_split(source, c.train_pos, c.train_unl, c.test_pos, c.test_neg,
                        derive_seed(rep_seed, SeedStage::Split));
    ContaminationSpec spec{0.3, 0.3, derive_seed(rep_seed, SeedStage::Contaminate)};
    const Dataset train = contaminate(split.train, split.leftover, spec);

    std::set<std::pair<double, double>> train_points;
    for (const Instance& inst : train.instances()) {
        double x = 0, y = 0;
        for (const auto& [idx, v] : inst.features()) (idx == 1 ? x : y) = v;
        train_points.insert({x, y});
    }
    for (const Instance& inst : split.test.instances()) {
        double x = 0, y = 0;
        for (const auto& [idx, v] : inst.features()) (idx == 1 ? x : y) = v;
        CHECK(train_points.count({x, y}) == 0);
    }
}

TEST_CASE("contamination study: zero rate is exactly zero, spread shrinks") {
    const auto zero = resample_contamination_study(0.0, {10, 100}, 500, 3);
    for (const StudyRow& row : zero) {
        CHECK(row.mean == 0.0);
        CHECK(row.ci_lo == 0.0);
        CHECK(row.ci_hi == 0.0);
    }

    const auto rows = resample_contamination_study(0.10, {10, 100, 1000}, 3000, 4);
    REQUIRE(rows.size() == 3);
    for (const StudyRow& row : rows) CHECK(std::fabs(row.mean - 0.10) < 0.01);
    CHECK(rows[0].ci_hi - rows[0].ci_lo > rows[1].ci_hi - rows[1].ci_lo);
    CHECK(rows[1].ci_hi - rows[1].ci_lo > rows[2].ci_hi - rows[2].ci_lo);
}

TEST_CASE("contamination sweep runs one experiment per level") {
    ExperimentConfig c = tiny_config();
    c.setting = Setting::SemiSupervised;
    c.contamination = 0.3; // the fixed axis
    c.repetitions = 1;
    c.methods = {Method::Cwsvm};
    TempDir dir("puforge_test_sweep");
    const auto rows = contamination_sweep(c, 'U', {0.0, 0.2}, dir.str());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].level == 0.0);
    CHECK(rows[1].level == 0.2);
    REQUIRE(rows[0].auc_pr.size() == 1);
    CHECK(fs::exists(dir.path / "sweep.csv"));
    CHECK(fs::exists(dir.path / "level00/summary.csv"));

    CHECK_THROWS_AS(contamination_sweep(c, 'X', {0.1}, dir.str()), ConfigError);
    CHECK_THROWS_AS(contamination_sweep(c, 'U', {0.6}, dir.str()), ConfigError);
}

TEST_CASE("harness accepts sparse files through the full pipeline") {
    TempDir dir("puforge_test_file");
    const std::string data_path = dir.str() + "/toy.txt";
    {
        // linearly structured toy data, ijcnn1-style labels
        Rng rng(55);
        std::ofstream out(data_path);
        for (int i = 0; i < 120; ++i) {
            const bool positive = i % 2 == 0;
            const double center = positive ? 1.0 : -1.0;
            out << (positive ? "+1" : "-1");
            for (int j = 1; j <= 3; ++j) {
                out << " " << j << ":" << center + rng.next_normal() * 0.4;
            }
            out << "\n";
        }
    }
    ExperimentConfig c = tiny_config();
    c.dataset = data_path;
    c.positive_label = 1.0;
    c.train_pos = 12;
    c.train_unl = 20;
    c.test_pos = 20;
    c.test_neg = 20;
    c.repetitions = 1;
    c.k_folds = 3;
    c.methods = {Method::Bagging};
    const RunResult r = run_experiment(c, dir.str() + "/out");
    CHECK_FALSE(r.failed);
    REQUIRE(r.summaries.size() == 1);
    CHECK(r.summaries[0].auc_pr_ci.mean > 0.8);
}

} // TEST_SUITE
