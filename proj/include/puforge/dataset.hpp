#ifndef PUFORGE_DATASET_HPP
#define PUFORGE_DATASET_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace puforge {

enum class Label : std::int8_t { Positive, Unlabeled, Negative };

struct ParseError : std::runtime_error {
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_number(line) {}
    std::size_t line_number;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One sparse feature vector. Indices are 1-based, strictly increasing.
// true_label is present only in simulation data and is never consulted by
// any training code, only by evaluation.
class Instance {
public:
    Instance() = default;
    Instance(std::vector<std::pair<std::uint32_t, double>> features, Label observed,
             std::optional<Label> truth = std::nullopt);

    const std::vector<std::pair<std::uint32_t, double>>& features() const { return features_; }
    Label observed_label() const { return observed_; }
    std::optional<Label> true_label() const { return truth_; }
    double self_dot() const { return self_dot_; }
    std::uint32_t max_index() const {
        return features_.empty() ? 0 : features_.back().first;
    }

    Instance with_observed(Label observed) const { return Instance(features_, observed, truth_); }

private:
    std::vector<std::pair<std::uint32_t, double>> features_;
    Label observed_ = Label::Unlabeled;
    std::optional<Label> truth_;
    double self_dot_ = 0.0; // cached x.x for kernel distance computations
};

// Immutable after construction; P and U are derived views, never stored.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<Instance> instances, std::uint32_t dimension = 0);

    const std::vector<Instance>& instances() const { return instances_; }
    std::size_t size() const { return instances_.size(); }
    bool empty() const { return instances_.empty(); }
    std::uint32_t dimension() const { return dimension_; }
    const Instance& operator[](std::size_t i) const { return instances_[i]; }

    std::vector<Instance> positives() const { return select(Label::Positive); }
    std::vector<Instance> unlabeled() const { return select(Label::Unlabeled); }
    std::size_t count_observed(Label label) const;

private:
    std::vector<Instance> select(Label label) const;

    std::vector<Instance> instances_;
    std::uint32_t dimension_ = 0;
};

struct ContaminationSpec {
    double rate_p = 0.0; // fraction of P replaced by true negatives
    double rate_u = 0.0; // fraction of U replaced by true positives
    std::uint64_t seed = 0;
};

// "label idx:value idx:value ..." with strictly increasing indices; '#'
// starts a comment, blank lines are skipped. positive_label decides the
// one-vs-all mapping (multiclass files pass e.g. the digit of interest).
// Observed labels are initialized equal to true labels.
Dataset parse_sparse_file(std::istream& in,
                          const std::function<bool(double)>& positive_label = {});
Dataset parse_sparse_file_path(const std::string& path,
                               const std::function<bool(double)>& positive_label = {});

// Inverse of the parser up to numeric formatting: "<label> i:v i:v\n" per
// instance, label from the true label (+1/-1), values with 17 significant
// digits.
void serialize_sparse(const Dataset& data, std::ostream& out);

// 2-D toy problem: positives ~ N(0, I); negatives uniform on the circle of
// radius 4 plus N(0, I) noise.
Dataset generate_synthetic(std::size_t n_pos, std::size_t n_neg, std::uint64_t seed);

struct SubsampleResult {
    Dataset train;    // train_p observed-Positive + train_u observed-Unlabeled
    Dataset test;     // observed labels equal true labels
    Dataset leftover; // everything not drawn; contamination pool
};

// Disjoint train/test split by sampling without replacement from the true
// classes. Training positives come from true positives; the unlabeled set is
// drawn from true negatives (the uncontaminated baseline where U is the
// negative class).
SubsampleResult subsample_split(const Dataset& data, std::size_t train_p, std::size_t train_u,
                                std::size_t test_p, std::size_t test_n, std::uint64_t seed);

// Label flipping. Replaces round(rate_p*|P|) members of P with true
// negatives drawn from the pool (observed stays Positive) and
// round(rate_u*|U|) members of U with true positives from the pool (observed
// stays Unlabeled). True labels are never altered, only set membership.
Dataset contaminate(const Dataset& train, const Dataset& pool, const ContaminationSpec& spec);

// n independent uniform draws with replacement.
std::vector<Instance> bootstrap(const std::vector<Instance>& source, std::size_t n,
                                std::uint64_t seed);
std::vector<std::uint32_t> bootstrap_indices(std::size_t source_size, std::size_t n,
                                             std::uint64_t seed);

// round-half-up of rate*size; 30% of 100 is exactly 30.
std::size_t contamination_count(double rate, std::size_t size);

} // namespace puforge

#endif
