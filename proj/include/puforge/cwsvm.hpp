#ifndef PUFORGE_CWSVM_HPP
#define PUFORGE_CWSVM_HPP

#include "puforge/dataset.hpp"
#include "puforge/kernel.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace puforge {

struct CwsvmParams {
    double c_p = 1.0; // penalty on instances labeled positive (y = +1)
    double c_u = 1.0; // penalty on unlabeled-as-negative instances (y = -1)
    KernelSpec kernel;
    double tolerance = 1e-3;
    std::size_t max_passes = 0;        // full passes of N pair updates; 0 = 10*N
    std::size_t cache_bytes = 64u << 20;
};

struct SupportVector {
    Instance x;
    std::int8_t y;   // +1 for P, -1 for U
    double alpha;    // 0 < alpha <= C_class
};

// Trained class-weighted SVM. psi(x) = sum_j alpha_j y_j k(x_j, x) + bias.
class CwsvmModel {
public:
    CwsvmModel() = default;
    CwsvmModel(std::vector<SupportVector> svs, double bias, CwsvmParams params, bool converged,
               std::uint32_t dimension);

    double decision_value(const Instance& x) const;

    const std::vector<SupportVector>& support_vectors() const { return svs_; }
    double bias() const { return bias_; }
    const CwsvmParams& params() const { return params_; }
    bool converged() const { return converged_; }

    void save(std::ostream& out) const;
    static CwsvmModel load(std::istream& in);

private:
    std::vector<SupportVector> svs_;
    double bias_ = 0.0;
    CwsvmParams params_;
    bool converged_ = true;
    // dense primal weights, linear kernel only: O(nnz) decision values
    std::vector<double> weights_;
};

// Solves the class-weighted SVM dual
//   min 1/2 a'Qa - e'a   s.t.  0 <= a_i <= C_i,  y'a = 0,
// with C_i = c_p on P and c_u on U, by two-variable coordinate steps on the
// maximal violating pair (ties to the lowest index). The returned model
// satisfies the KKT certificate within params.tolerance unless the pass
// budget ran out, in which case converged() is false and the caller decides.
CwsvmModel train_cwsvm(const std::vector<Instance>& positives,
                       const std::vector<Instance>& unlabeled, const CwsvmParams& params);

// Value of the class-weighted objective
//   1/2 sum_ij a_i a_j y_i y_j k(x_i,x_j) + C_P sum_P xi_i + C_U sum_U xi_i
// at the model's solution, slacks xi = max(0, 1 - y psi(x)). Test surface
// for the brute-force QP oracle.
double dual_objective(const CwsvmModel& model, const std::vector<Instance>& positives,
                      const std::vector<Instance>& unlabeled);

} // namespace puforge

#endif
