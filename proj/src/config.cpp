#include "puforge/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace puforge {

const char* method_name(Method m) {
    switch (m) {
        case Method::Cwsvm: return "cwsvm";
        case Method::Bagging: return "bagging";
        case Method::Resvm: return "resvm";
    }
    return "?";
}

const char* setting_name(Setting s) {
    switch (s) {
        case Setting::Supervised: return "supervised";
        case Setting::PU: return "pu";
        case Setting::SemiSupervised: return "semisupervised";
    }
    return "?";
}

double ExperimentConfig::rate_p() const {
    if (override_rate_p) return *override_rate_p;
    return setting == Setting::SemiSupervised ? contamination : 0.0;
}

double ExperimentConfig::rate_u() const {
    if (override_rate_u) return *override_rate_u;
    return setting == Setting::Supervised ? 0.0 : contamination;
}

ExperimentConfig default_config() {
    ExperimentConfig c;
    c.grid_c_p = {0.03125, 0.125, 0.5, 2.0, 8.0, 32.0};
    c.grid_c_u = {0.03125, 0.125, 0.5, 2.0, 8.0, 32.0};
    c.grid_w_pos = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
    c.grid_gamma = {0.0078125, 0.03125, 0.125, 0.5, 2.0, 8.0};
    c.grid_n_pos_frac = {0.05, 0.1, 0.2, 0.5, 1.0};
    c.grid_n_unl_ratio = {1.0, 2.0, 5.0, 10.0};
    c.grid_n_u_frac = {0.1, 0.25, 0.5, 1.0};
    c.box_c_p = {0.03125, 32.0};
    c.box_c_u = {0.03125, 32.0};
    c.box_w_pos = {0.25, 16.0};
    c.box_gamma = {0.0078125, 8.0};
    c.box_n_pos_frac = {0.05, 1.0};
    c.box_n_unl_ratio = {1.0, 10.0};
    c.box_n_u_frac = {0.1, 1.0};
    return c;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': bad number '" + value + "'");
    }
}

std::vector<double> to_doubles(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const std::string& item : split_list(value)) out.push_back(to_double(key, item));
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::pair<double, double> to_box(const std::string& key, const std::string& value) {
    const auto colon = value.find(':');
    if (colon == std::string::npos) {
        throw ConfigError("config key '" + key + "': expected lo:hi");
    }
    return {to_double(key, trim(value.substr(0, colon))),
            to_double(key, trim(value.substr(colon + 1)))};
}

void apply_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
    auto usize = [&](const std::string& v) {
        const double d = to_double(key, v);
        if (d < 0 || d != std::floor(d)) {
            throw ConfigError("config key '" + key + "': expected a non-negative integer");
        }
        return static_cast<std::size_t>(d);
    };

    if (key == "dataset") c.dataset = value;
    else if (key == "positive_label") c.positive_label = to_double(key, value);
    else if (key == "setting") {
        if (value == "supervised") c.setting = Setting::Supervised;
        else if (value == "pu") c.setting = Setting::PU;
        else if (value == "semisupervised") c.setting = Setting::SemiSupervised;
        else throw ConfigError("config key 'setting': unknown value '" + value + "'");
    } else if (key == "contamination") c.contamination = to_double(key, value);
    else if (key == "train_pos") c.train_pos = usize(value);
    else if (key == "train_unl") c.train_unl = usize(value);
    else if (key == "test_pos") c.test_pos = usize(value);
    else if (key == "test_neg") c.test_neg = usize(value);
    else if (key == "methods") {
        c.methods.clear();
        for (const std::string& m : split_list(value)) {
            if (m == "cwsvm") c.methods.push_back(Method::Cwsvm);
            else if (m == "bagging") c.methods.push_back(Method::Bagging);
            else if (m == "resvm") c.methods.push_back(Method::Resvm);
            else throw ConfigError("config key 'methods': unknown method '" + m + "'");
        }
    } else if (key == "repetitions") c.repetitions = usize(value);
    else if (key == "k_folds") c.k_folds = usize(value);
    else if (key == "n_models") c.n_models = usize(value);
    else if (key == "kernel") {
        if (value == "rbf") c.kernel = KernelSpec::Kind::Rbf;
        else if (value == "linear") c.kernel = KernelSpec::Kind::Linear;
        else throw ConfigError("config key 'kernel': unknown value '" + value + "'");
    } else if (key == "search") {
        if (value == "grid") c.search_mode = SearchMode::Grid;
        else if (value == "random") c.search_mode = SearchMode::Random;
        else throw ConfigError("config key 'search': unknown value '" + value + "'");
    } else if (key == "random_budget") c.random_budget = usize(value);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "workers") c.workers = static_cast<int>(usize(value));
    else if (key == "grid_c_p") c.grid_c_p = to_doubles(key, value);
    else if (key == "grid_c_u") c.grid_c_u = to_doubles(key, value);
    else if (key == "grid_w_pos") c.grid_w_pos = to_doubles(key, value);
    else if (key == "grid_gamma") c.grid_gamma = to_doubles(key, value);
    else if (key == "grid_n_pos_frac") c.grid_n_pos_frac = to_doubles(key, value);
    else if (key == "grid_n_unl_ratio") c.grid_n_unl_ratio = to_doubles(key, value);
    else if (key == "grid_n_u_frac") c.grid_n_u_frac = to_doubles(key, value);
    else if (key == "box_c_p") c.box_c_p = to_box(key, value);
    else if (key == "box_c_u") c.box_c_u = to_box(key, value);
    else if (key == "box_w_pos") c.box_w_pos = to_box(key, value);
    else if (key == "box_gamma") c.box_gamma = to_box(key, value);
    else if (key == "box_n_pos_frac") c.box_n_pos_frac = to_box(key, value);
    else if (key == "box_n_unl_ratio") c.box_n_unl_ratio = to_box(key, value);
    else if (key == "box_n_u_frac") c.box_n_u_frac = to_box(key, value);
    else throw ConfigError("unknown config key '" + key + "'");
}

const char* kKeys[] = {
    "dataset",       "positive_label", "setting",         "contamination",
    "train_pos",     "train_unl",      "test_pos",        "test_neg",
    "methods",       "repetitions",    "k_folds",         "n_models",
    "kernel",        "search",         "random_budget",   "seed",
    "workers",       "grid_c_p",       "grid_c_u",        "grid_w_pos",
    "grid_gamma",    "grid_n_pos_frac", "grid_n_unl_ratio", "grid_n_u_frac",
    "box_c_p",       "box_c_u",        "box_w_pos",       "box_gamma",
    "box_n_pos_frac", "box_n_unl_ratio", "box_n_u_frac",
};

void apply_env_overrides(ExperimentConfig& c) {
    for (const char* key : kKeys) {
        std::string env_name = "PUFORGE_";
        for (const char* p = key; *p; ++p) {
            env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
        }
        if (const char* value = std::getenv(env_name.c_str())) {
            apply_key(c, key, trim(value));
        }
    }
}

} // namespace

void ExperimentConfig::validate() const {
    if (contamination < 0.0 || contamination >= 0.5) {
        throw ConfigError("contamination must lie in [0, 0.5)");
    }
    const bool rates_pinned = override_rate_p || override_rate_u;
    if (!rates_pinned && setting == Setting::Supervised && contamination != 0.0) {
        throw ConfigError("supervised setting requires contamination = 0");
    }
    if (!rates_pinned && setting != Setting::Supervised && contamination == 0.0) {
        throw ConfigError(std::string(setting_name(setting)) +
                          " setting requires contamination > 0");
    }
    if (methods.empty()) throw ConfigError("no methods selected");
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (k_folds < 2) throw ConfigError("k_folds must be >= 2");
    if (n_models < 1) throw ConfigError("n_models must be >= 1");
    if (train_pos < k_folds) {
        throw ConfigError("train_pos must be >= k_folds for stratified folds");
    }
    if (train_unl < 1 || test_pos < 1 || test_neg < 1) {
        throw ConfigError("train_unl, test_pos and test_neg must be >= 1");
    }
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig c = default_config();
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_number) +
                              ": expected key = value");
        }
        apply_key(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    apply_env_overrides(c);
    return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

namespace {

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    char buf[40];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%s%.17g", i ? "," : "", values[i]);
        out += buf;
    }
    return out;
}

std::string box_str(const std::pair<double, double>& box) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%.17g:%.17g", box.first, box.second);
    return buf;
}

} // namespace

void write_config(const ExperimentConfig& c, std::ostream& out) {
    char buf[128];
    out << "dataset = " << c.dataset << "\n";
    std::snprintf(buf, sizeof(buf), "positive_label = %.17g\n", c.positive_label);
    out << buf;
    out << "setting = " << setting_name(c.setting) << "\n";
    std::snprintf(buf, sizeof(buf), "contamination = %.17g\n", c.contamination);
    out << buf;
    out << "train_pos = " << c.train_pos << "\n";
    out << "train_unl = " << c.train_unl << "\n";
    out << "test_pos = " << c.test_pos << "\n";
    out << "test_neg = " << c.test_neg << "\n";
    out << "methods = ";
    for (std::size_t i = 0; i < c.methods.size(); ++i) {
        out << (i ? "," : "") << method_name(c.methods[i]);
    }
    out << "\n";
    out << "repetitions = " << c.repetitions << "\n";
    out << "k_folds = " << c.k_folds << "\n";
    out << "n_models = " << c.n_models << "\n";
    out << "kernel = " << (c.kernel == KernelSpec::Kind::Rbf ? "rbf" : "linear") << "\n";
    out << "search = " << (c.search_mode == SearchMode::Grid ? "grid" : "random") << "\n";
    out << "random_budget = " << c.random_budget << "\n";
    out << "seed = " << c.seed << "\n";
    out << "workers = " << c.workers << "\n";
    out << "grid_c_p = " << join_doubles(c.grid_c_p) << "\n";
    out << "grid_c_u = " << join_doubles(c.grid_c_u) << "\n";
    out << "grid_w_pos = " << join_doubles(c.grid_w_pos) << "\n";
    out << "grid_gamma = " << join_doubles(c.grid_gamma) << "\n";
    out << "grid_n_pos_frac = " << join_doubles(c.grid_n_pos_frac) << "\n";
    out << "grid_n_unl_ratio = " << join_doubles(c.grid_n_unl_ratio) << "\n";
    out << "grid_n_u_frac = " << join_doubles(c.grid_n_u_frac) << "\n";
    out << "box_c_p = " << box_str(c.box_c_p) << "\n";
    out << "box_c_u = " << box_str(c.box_c_u) << "\n";
    out << "box_w_pos = " << box_str(c.box_w_pos) << "\n";
    out << "box_gamma = " << box_str(c.box_gamma) << "\n";
    out << "box_n_pos_frac = " << box_str(c.box_n_pos_frac) << "\n";
    out << "box_n_unl_ratio = " << box_str(c.box_n_unl_ratio) << "\n";
    out << "box_n_u_frac = " << box_str(c.box_n_u_frac) << "\n";
}

} // namespace puforge
