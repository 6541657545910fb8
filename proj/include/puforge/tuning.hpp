#ifndef PUFORGE_TUNING_HPP
#define PUFORGE_TUNING_HPP

#include "puforge/dataset.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace puforge {

struct TuningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Stratified fold assignment. Depends only on observed labels, instance
// order and the seed, never on feature values.
struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::uint32_t> assignment; // instance -> fold
    std::uint64_t seed = 0;

    std::vector<std::vector<std::uint32_t>> fold_indices() const;
};

// Fold sizes differ by at most one and every fold holds at least one
// observed positive.
FoldPlan make_folds(const Dataset& train, std::size_t k, std::uint64_t seed);

// Values aligned with SearchSpace::axes.
using ParamTuple = std::vector<double>;

struct ParamAxis {
    std::string name;
    std::vector<double> grid; // grid mode: explicit values in canonical order
    double lo = 0.0;          // random mode box
    double hi = 0.0;
    bool integer = false;     // random mode: sample integers uniformly
};

struct SearchSpace {
    std::vector<ParamAxis> axes;
    std::size_t budget = 100; // tuples drawn in random mode
};

enum class SearchMode { Grid, Random };

// Trains on the given P/U and returns +1/-1 labels for the held-out block.
using FoldTrainer = std::function<std::vector<int>(
    const std::vector<Instance>& train_p, const std::vector<Instance>& train_u,
    const std::vector<Instance>& heldout, std::size_t fold)>;

// Per-fold pu_score values; folds may be evaluated concurrently.
std::vector<double> cross_val_scores(const FoldTrainer& trainer, const FoldPlan& plan,
                                     const Dataset& data, int workers = 1);

// Mean pu_score over the folds.
double cross_val_score(const FoldTrainer& trainer, const FoldPlan& plan, const Dataset& data,
                       int workers = 1);

struct ScoreRow {
    std::size_t tuple_id;
    ParamTuple tuple;
    std::size_t fold;
    double score; // NaN when the trainer failed on this tuple
};

struct SearchResult {
    ParamTuple best;
    std::size_t best_id = 0;
    double best_score = 0.0;
    bool on_boundary = false; // edge-of-grid audit flag
    std::vector<std::string> axis_names;
    std::vector<ScoreRow> table;
};

// Per-tuple scorer returning one score per fold; throws to mark the whole
// tuple failed.
using TupleScorer = std::function<std::vector<double>(const ParamTuple&, std::size_t tuple_id)>;

// Grid mode enumerates the cartesian product with the last axis fastest;
// random mode samples `budget` tuples uniformly inside the box. Best tuple
// by mean score, ties to the earliest tuple in enumeration order.
SearchResult search(const SearchSpace& space, const TupleScorer& scorer, SearchMode mode,
                    std::uint64_t seed, int workers = 1);

// "tuple_id,param=value;...,fold,score" rows.
void write_score_table_csv(const SearchResult& result, std::ostream& out);

} // namespace puforge

#endif
