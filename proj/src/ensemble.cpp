#include "puforge/ensemble.hpp"

#include "puforge/parallel.hpp"
#include "puforge/rng.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace puforge {

double EnsembleModel::vote_fraction(const Instance& x) const {
    const std::size_t n = members_.size();
    long long sign_sum = 0;
    for (const CwsvmModel& member : members_) {
        sign_sum += member.decision_value(x) >= 0.0 ? 1 : -1;
    }
    return (static_cast<double>(n) + static_cast<double>(sign_sum)) /
           (2.0 * static_cast<double>(n));
}

double EnsembleModel::decision_value(const Instance& x) const {
    const std::size_t n = members_.size();
    long long sign_sum = 0;
    double value_sum = 0.0;
    for (const CwsvmModel& member : members_) {
        const double psi = member.decision_value(x);
        sign_sum += psi >= 0.0 ? 1 : -1;
        value_sum += psi;
    }
    const double votes = (static_cast<double>(n) + static_cast<double>(sign_sum)) /
                         (2.0 * static_cast<double>(n));
    if (votes == 0.0) return value_sum;
    if (votes == 1.0) return 1.0 + value_sum;
    return votes;
}

int EnsembleModel::predict_label(const Instance& x, double threshold) const {
    return decision_value(x) > threshold ? +1 : -1;
}

EnsembleModel train_resvm(const std::vector<Instance>& positives,
                          const std::vector<Instance>& unlabeled, const ResvmParams& params,
                          int workers) {
    if (positives.empty() || unlabeled.empty()) {
        throw DataError("train_resvm requires non-empty P and U");
    }
    if (params.n_models < 1 || params.n_pos < 1 || params.n_unl < 1) {
        throw DataError("resvm counts must be >= 1");
    }

    CwsvmParams base;
    base.c_p = params.derived_c_p();
    base.c_u = params.c_u;
    base.kernel = params.kernel;

    std::vector<CwsvmModel> members(params.n_models);
    std::vector<std::string> errors(params.n_models);
    parallel_for(params.n_models, workers, [&](std::size_t i) {
        try {
            const std::uint64_t member_seed = derive_seed(params.seed, SeedStage::Member, i);
            const auto p_i = bootstrap(positives, params.n_pos, derive_seed(member_seed, 1));
            const auto u_i = bootstrap(unlabeled, params.n_unl, derive_seed(member_seed, 2));
            members[i] = train_cwsvm(p_i, u_i, base);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i].empty()) {
            throw DataError("member " + std::to_string(i) + ": " + errors[i]);
        }
    }
    return EnsembleModel(std::move(members));
}

EnsembleModel train_bagging(const std::vector<Instance>& positives,
                            const std::vector<Instance>& unlabeled, const BaggingParams& params,
                            int workers) {
    if (positives.empty() || unlabeled.empty()) {
        throw DataError("train_bagging requires non-empty P and U");
    }
    if (params.n_models < 1 || params.n_u < 1) throw DataError("bagging counts must be >= 1");

    CwsvmParams base;
    base.c_p = params.derived_c_p(positives.size());
    base.c_u = params.c_u;
    base.kernel = params.kernel;

    std::vector<CwsvmModel> members(params.n_models);
    std::vector<std::string> errors(params.n_models);
    parallel_for(params.n_models, workers, [&](std::size_t i) {
        try {
            const std::uint64_t member_seed = derive_seed(params.seed, SeedStage::Member, i);
            const auto u_i = bootstrap(unlabeled, params.n_u, derive_seed(member_seed, 2));
            members[i] = train_cwsvm(positives, u_i, base);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i].empty()) {
            throw DataError("member " + std::to_string(i) + ": " + errors[i]);
        }
    }
    return EnsembleModel(std::move(members));
}

std::vector<double> decision_values(const EnsembleModel& model,
                                    const std::vector<Instance>& instances, int workers) {
    std::vector<double> out(instances.size());
    parallel_for(instances.size(), workers,
                 [&](std::size_t i) { out[i] = model.decision_value(instances[i]); });
    return out;
}

std::vector<double> decision_values(const CwsvmModel& model,
                                    const std::vector<Instance>& instances, int workers) {
    std::vector<double> out(instances.size());
    parallel_for(instances.size(), workers,
                 [&](std::size_t i) { out[i] = model.decision_value(instances[i]); });
    return out;
}

void EnsembleModel::save(std::ostream& out) const {
    out << "puforge-ensemble-v1\n";
    out << "n_models " << members_.size() << "\n";
    out << "threshold " << threshold_default_ << "\n";
    for (const CwsvmModel& member : members_) member.save(out);
}

EnsembleModel EnsembleModel::load(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "puforge-ensemble-v1") {
        throw DataError("not an ensemble model file");
    }
    std::string word;
    std::size_t n_models = 0;
    in >> word >> n_models;
    if (word != "n_models") throw DataError("ensemble file: expected n_models");
    double threshold = 0.5;
    in >> word >> threshold;
    if (word != "threshold") throw DataError("ensemble file: expected threshold");
    std::getline(in, line);

    std::vector<CwsvmModel> members;
    members.reserve(n_models);
    for (std::size_t i = 0; i < n_models; ++i) {
        members.push_back(CwsvmModel::load(in));
    }
    return EnsembleModel(std::move(members), threshold);
}

} // namespace puforge
