#ifndef PUFORGE_CONFIG_HPP
#define PUFORGE_CONFIG_HPP

#include "puforge/kernel.hpp"
#include "puforge/tuning.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace puforge {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Setting { Supervised, PU, SemiSupervised };
enum class Method { Cwsvm, Bagging, Resvm };

const char* method_name(Method m);
const char* setting_name(Setting s);

// Flat key = value text; '#' comments; keys lowercase with underscores.
// Every key can be overridden by the environment as PUFORGE_<KEY uppercased>.
struct ExperimentConfig {
    std::string dataset = "synthetic"; // "synthetic" or a sparse-file path
    double positive_label = 1.0;       // file mode: label mapped to Positive
    Setting setting = Setting::Supervised;
    double contamination = 0.0;        // per-setting: PU -> U only, semi -> both

    std::size_t train_pos = 100;
    std::size_t train_unl = 200;
    std::size_t test_pos = 5000;
    std::size_t test_neg = 5000;

    std::vector<Method> methods = {Method::Cwsvm, Method::Bagging, Method::Resvm};
    std::size_t repetitions = 20;
    std::size_t k_folds = 10;
    std::size_t n_models = 50;

    KernelSpec::Kind kernel = KernelSpec::Kind::Rbf;
    SearchMode search_mode = SearchMode::Grid;
    std::size_t random_budget = 100;

    std::uint64_t seed = 42;
    int workers = 1;

    // Search grids; geometric ladders by default, overridable per run.
    std::vector<double> grid_c_p;
    std::vector<double> grid_c_u;
    std::vector<double> grid_w_pos;
    std::vector<double> grid_gamma;
    std::vector<double> grid_n_pos_frac;  // fractions of |P|
    std::vector<double> grid_n_unl_ratio; // n_unl / n_pos
    std::vector<double> grid_n_u_frac;    // bagging resample, fraction of |U|

    // Random-search boxes as {lo, hi}; defaults span the grids.
    std::pair<double, double> box_c_p, box_c_u, box_w_pos, box_gamma, box_n_pos_frac,
        box_n_unl_ratio, box_n_u_frac;

    // Set by contamination_sweep to pin the two rates independently of the
    // setting; not a config-file key.
    std::optional<double> override_rate_p;
    std::optional<double> override_rate_u;

    // resolved contamination rates (setting applied)
    double rate_p() const;
    double rate_u() const;

    void validate() const;
};

ExperimentConfig default_config();

// Parse from a stream/file and apply PUFORGE_* environment overrides.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

// Effective settings, one key = value per line; parseable by parse_config.
void write_config(const ExperimentConfig& config, std::ostream& out);

} // namespace puforge

#endif
