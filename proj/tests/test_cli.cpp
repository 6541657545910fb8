// End-to-end checks of the command-line surface: exit codes, the predict
// output format, and a config-driven run. The binary path arrives through
// the PUFORGE_BIN environment variable set by CTest.

#include "puforge/cwsvm.hpp"
#include "puforge/dataset.hpp"
#include "puforge/ensemble.hpp"
#include "puforge/rng.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace puforge;

namespace {

std::string binary() {
    const char* path = std::getenv("PUFORGE_BIN");
    REQUIRE(path != nullptr);
    return path;
}

int run(const std::string& args) {
    const std::string cmd = binary() + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
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

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with code 1") {
    CHECK(run("") == 1);
    CHECK(run("run") == 1);                          // missing --config
    CHECK(run("run --config /no/such/file") == 1);   // unreadable config
    CHECK(run("frobnicate") == 1);                   // unknown subcommand
    CHECK(run("predict --model /none --data /none") == 1);
}

TEST_CASE("run executes a config and writes the result tree") {
    TempDir dir("puforge_cli_run");
    const std::string config_path = dir.str() + "/exp.conf";
    {
        std::ofstream out(config_path);
        out << "dataset = synthetic\n"
               "setting = supervised\n"
               "contamination = 0\n"
               "train_pos = 15\ntrain_unl = 30\ntest_pos = 60\ntest_neg = 60\n"
               "methods = cwsvm\n"
               "repetitions = 2\nk_folds = 3\nn_models = 4\nseed = 5\n"
               "grid_c_p = 1\ngrid_c_u = 1\ngrid_gamma = 0.5\n";
    }
    CHECK(run("run --config " + config_path + " --out " + dir.str() + "/out") == 0);
    CHECK(fs::exists(dir.path / "out/summary.csv"));
    CHECK(fs::exists(dir.path / "out/repetitions.csv"));

    // --seed override changes the outputs
    CHECK(run("run --config " + config_path + " --seed 6 --out " + dir.str() + "/out2") == 0);
    CHECK(slurp(dir.str() + "/out/summary.csv") != slurp(dir.str() + "/out2/summary.csv"));
}

TEST_CASE("contamination-study writes the csv table") {
    TempDir dir("puforge_cli_study");
    CHECK(run("contamination-study --rate 0.1 --sizes 10,100 --trials 500 --out " + dir.str()) ==
          0);
    const std::string csv = slurp(dir.str() + "/study.csv");
    CHECK(csv.find("size,mean,ci_lo,ci_hi") == 0);
}

TEST_CASE("predict emits decision values with 9 significant digits") {
    TempDir dir("puforge_cli_predict");

    Rng rng(61);
    std::vector<Instance> p, u;
    for (int i = 0; i < 10; ++i) {
        p.push_back(Instance({{1, 1.0 + rng.next_normal()}}, Label::Positive));
        u.push_back(Instance({{1, -1.0 + rng.next_normal()}}, Label::Unlabeled));
    }
    CwsvmParams params;
    params.c_p = params.c_u = 1.0;
    params.kernel = KernelSpec::rbf(0.5);
    const CwsvmModel model = train_cwsvm(p, u, params);

    const std::string model_path = dir.str() + "/model.txt";
    {
        std::ofstream out(model_path);
        model.save(out);
    }
    const std::string data_path = dir.str() + "/data.txt";
    std::vector<Instance> probes;
    {
        std::ofstream out(data_path);
        char line[64];
        for (int i = 0; i < 7; ++i) {
            const double x = rng.next_uniform(-2, 2);
            std::snprintf(line, sizeof(line), "+1 1:%.17g\n", x);
            out << line;
            probes.push_back(Instance({{1, x}}, Label::Unlabeled));
        }
    }

    const std::string out_path = dir.str() + "/scores.txt";
    CHECK(run("predict --model " + model_path + " --data " + data_path + " --out " + out_path) ==
          0);

    std::ifstream scores(out_path);
    char expected[48];
    for (const Instance& probe : probes) {
        std::string line;
        REQUIRE(std::getline(scores, line));
        std::snprintf(expected, sizeof(expected), "%.9g", model.decision_value(probe));
        CHECK(line == expected);
    }

    // ensembles ride the same subcommand
    const EnsembleModel ensemble(std::vector<CwsvmModel>(3, model));
    const std::string ens_path = dir.str() + "/ensemble.txt";
    {
        std::ofstream out(ens_path);
        ensemble.save(out);
    }
    const std::string ens_out = dir.str() + "/ens_scores.txt";
    CHECK(run("predict --model " + ens_path + " --data " + data_path + " --out " + ens_out) == 0);
    std::ifstream ens_scores(ens_out);
    for (const Instance& probe : probes) {
        std::string line;
        REQUIRE(std::getline(ens_scores, line));
        std::snprintf(expected, sizeof(expected), "%.9g", ensemble.decision_value(probe));
        CHECK(line == expected);
    }
}

TEST_CASE("tune prints the winning tuples") {
    TempDir dir("puforge_cli_tune");
    const std::string config_path = dir.str() + "/exp.conf";
    {
        std::ofstream out(config_path);
        out << "dataset = synthetic\nsetting = supervised\ncontamination = 0\n"
               "train_pos = 15\ntrain_unl = 30\ntest_pos = 30\ntest_neg = 30\n"
               "methods = cwsvm\nrepetitions = 1\nk_folds = 3\nn_models = 4\nseed = 9\n"
               "grid_c_p = 0.5,2\ngrid_c_u = 1\ngrid_gamma = 0.5\n";
    }
    const std::string cmd = binary() + " tune --config " + config_path + " --out " + dir.str() +
                            "/tune_out > " + dir.str() + "/stdout.txt 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    const std::string stdout_text = slurp(dir.str() + "/stdout.txt");
    CHECK(stdout_text.find("cwsvm") != std::string::npos);
    CHECK(stdout_text.find("c_p=") != std::string::npos);
}

} // TEST_SUITE
