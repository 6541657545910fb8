#ifndef PUFORGE_ENSEMBLE_HPP
#define PUFORGE_ENSEMBLE_HPP

#include "puforge/cwsvm.hpp"
#include "puforge/dataset.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace puforge {

struct ResvmParams {
    std::size_t n_models = 50;
    std::size_t n_pos = 1;  // bootstrap resample size of P
    std::size_t n_unl = 1;  // bootstrap resample size of U
    double c_u = 1.0;
    double w_pos = 1.0;     // relative penalty after class-imbalance correction
    KernelSpec kernel;
    std::uint64_t seed = 0;

    // C_P = C_U * w_pos * n_unl / n_pos
    double derived_c_p() const {
        return c_u * w_pos * static_cast<double>(n_unl) / static_cast<double>(n_pos);
    }
};

struct BaggingParams {
    std::size_t n_models = 50;
    std::size_t n_u = 1;    // resample size of U; P is used in full
    double c_u = 1.0;
    KernelSpec kernel;
    std::uint64_t seed = 0;

    // |P| * C_P = n_U * C_U
    double derived_c_p(std::size_t p_size) const {
        return c_u * static_cast<double>(n_u) / static_cast<double>(p_size);
    }
};

// Ordered collection of base models plus the vote/decision aggregation.
// Aggregation is invariant under member permutation.
class EnsembleModel {
public:
    EnsembleModel() = default;
    explicit EnsembleModel(std::vector<CwsvmModel> members, double threshold_default = 0.5)
        : members_(std::move(members)), threshold_default_(threshold_default) {}

    const std::vector<CwsvmModel>& members() const { return members_; }
    std::size_t n_models() const { return members_.size(); }
    double threshold_default() const { return threshold_default_; }

    // Fraction of positive votes, (n + sum sgn(psi_i)) / 2n; sgn(0) votes +1.
    double vote_fraction(const Instance& x) const;

    // v(x) for split votes; sum of member values at a unanimous negative;
    // 1 + sum at a unanimous positive.
    double decision_value(const Instance& x) const;

    // sgn(d(x) - T); the tie d == T resolves to -1 (a positive needs a
    // strict majority).
    int predict_label(const Instance& x, double threshold) const;
    int predict_label(const Instance& x) const { return predict_label(x, threshold_default_); }

    void save(std::ostream& out) const;
    static EnsembleModel load(std::istream& in);

private:
    std::vector<CwsvmModel> members_;
    double threshold_default_ = 0.5;
};

// Algorithm: for each member, bootstrap n_pos from P and n_unl from U, then
// train a CWSVM with C_P from the coupling rule. Member seeds derive from
// (params.seed, member index), so members are reproducible individually and
// the result does not depend on training order.
EnsembleModel train_resvm(const std::vector<Instance>& positives,
                          const std::vector<Instance>& unlabeled, const ResvmParams& params,
                          int workers = 1);

// Full P versus a bootstrap resample of U per member.
EnsembleModel train_bagging(const std::vector<Instance>& positives,
                            const std::vector<Instance>& unlabeled, const BaggingParams& params,
                            int workers = 1);

// Batch ensemble decision values, parallel over instances.
std::vector<double> decision_values(const EnsembleModel& model,
                                    const std::vector<Instance>& instances, int workers = 1);

// Batch CWSVM decision values, parallel over instances.
std::vector<double> decision_values(const CwsvmModel& model,
                                    const std::vector<Instance>& instances, int workers = 1);

} // namespace puforge

#endif
