#include "puforge/tuning.hpp"

#include "puforge/metrics.hpp"
#include "puforge/parallel.hpp"
#include "puforge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace puforge {

std::vector<std::vector<std::uint32_t>> FoldPlan::fold_indices() const {
    std::vector<std::vector<std::uint32_t>> folds(k);
    for (std::uint32_t i = 0; i < assignment.size(); ++i) {
        folds[assignment[i]].push_back(i);
    }
    return folds;
}

FoldPlan make_folds(const Dataset& train, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw TuningError("make_folds: k must be >= 2");
    std::vector<std::uint32_t> positives, others;
    for (std::uint32_t i = 0; i < train.size(); ++i) {
        (train[i].observed_label() == Label::Positive ? positives : others).push_back(i);
    }
    if (positives.size() < k) {
        throw TuningError("make_folds: need at least k observed positives to stratify");
    }

    Rng rng(seed);
    auto shuffle = [&rng](std::vector<std::uint32_t>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[rng.next_below(i)]);
        }
    };
    shuffle(positives);
    shuffle(others);

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignment.resize(train.size());

    std::vector<std::size_t> sizes(k, 0);
    // Positives round-robin keeps them spread evenly; the rest go to the
    // currently smallest fold, which keeps total sizes within one.
    for (std::size_t i = 0; i < positives.size(); ++i) {
        const std::size_t f = i % k;
        plan.assignment[positives[i]] = static_cast<std::uint32_t>(f);
        ++sizes[f];
    }
    for (std::uint32_t idx : others) {
        const std::size_t f = static_cast<std::size_t>(
            std::min_element(sizes.begin(), sizes.end()) - sizes.begin());
        plan.assignment[idx] = static_cast<std::uint32_t>(f);
        ++sizes[f];
    }
    return plan;
}

std::vector<double> cross_val_scores(const FoldTrainer& trainer, const FoldPlan& plan,
                                     const Dataset& data, int workers) {
    if (plan.assignment.size() != data.size()) {
        throw TuningError("cross_val_scores: plan does not match dataset");
    }
    std::vector<double> scores(plan.k);
    std::vector<std::string> errors(plan.k);
    parallel_for(plan.k, workers, [&](std::size_t f) {
        try {
            std::vector<Instance> train_p, train_u, heldout;
            std::vector<bool> heldout_positive;
            for (std::size_t i = 0; i < data.size(); ++i) {
                if (plan.assignment[i] == f) {
                    heldout.push_back(data[i]);
                    heldout_positive.push_back(data[i].observed_label() == Label::Positive);
                } else if (data[i].observed_label() == Label::Positive) {
                    train_p.push_back(data[i]);
                } else {
                    train_u.push_back(data[i]);
                }
            }
            const std::vector<int> predicted = trainer(train_p, train_u, heldout, f);
            scores[f] = pu_score(predicted, heldout_positive);
        } catch (const std::exception& e) {
            errors[f] = e.what();
        }
    });
    for (std::size_t f = 0; f < plan.k; ++f) {
        if (!errors[f].empty()) {
            throw TuningError("fold " + std::to_string(f) + ": " + errors[f]);
        }
    }
    return scores;
}

double cross_val_score(const FoldTrainer& trainer, const FoldPlan& plan, const Dataset& data,
                       int workers) {
    const auto scores = cross_val_scores(trainer, plan, data, workers);
    return std::accumulate(scores.begin(), scores.end(), 0.0) /
           static_cast<double>(scores.size());
}

namespace {

std::vector<ParamTuple> enumerate_grid(const SearchSpace& space) {
    std::size_t total = 1;
    for (const ParamAxis& axis : space.axes) {
        if (axis.grid.empty()) throw TuningError("grid axis '" + axis.name + "' has no values");
        total *= axis.grid.size();
    }
    std::vector<ParamTuple> tuples;
    tuples.reserve(total);
    ParamTuple current(space.axes.size());
    // last axis varies fastest
    for (std::size_t id = 0; id < total; ++id) {
        std::size_t rem = id;
        for (std::size_t a = space.axes.size(); a-- > 0;) {
            const auto& grid = space.axes[a].grid;
            current[a] = grid[rem % grid.size()];
            rem /= grid.size();
        }
        tuples.push_back(current);
    }
    return tuples;
}

std::vector<ParamTuple> sample_box(const SearchSpace& space, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ParamTuple> tuples;
    tuples.reserve(space.budget);
    for (std::size_t t = 0; t < space.budget; ++t) {
        ParamTuple tuple(space.axes.size());
        for (std::size_t a = 0; a < space.axes.size(); ++a) {
            const ParamAxis& axis = space.axes[a];
            if (axis.hi < axis.lo) throw TuningError("axis '" + axis.name + "': empty box");
            if (axis.integer) {
                const auto span = static_cast<std::uint64_t>(axis.hi - axis.lo) + 1;
                tuple[a] = axis.lo + static_cast<double>(rng.next_below(span));
            } else {
                tuple[a] = rng.next_uniform(axis.lo, axis.hi);
            }
        }
        tuples.push_back(tuple);
    }
    return tuples;
}

bool tuple_on_boundary(const SearchSpace& space, const ParamTuple& tuple, SearchMode mode) {
    for (std::size_t a = 0; a < space.axes.size(); ++a) {
        const ParamAxis& axis = space.axes[a];
        if (mode == SearchMode::Grid) {
            if (tuple[a] == axis.grid.front() || tuple[a] == axis.grid.back()) return true;
        } else {
            if (tuple[a] == axis.lo || tuple[a] == axis.hi) return true;
        }
    }
    return false;
}

} // namespace

SearchResult search(const SearchSpace& space, const TupleScorer& scorer, SearchMode mode,
                    std::uint64_t seed, int workers) {
    if (space.axes.empty()) throw TuningError("search: empty space");
    const std::vector<ParamTuple> tuples =
        mode == SearchMode::Grid ? enumerate_grid(space) : sample_box(space, seed);
    if (tuples.empty()) throw TuningError("search: no tuples to evaluate");

    std::vector<std::vector<double>> fold_scores(tuples.size());
    std::vector<std::string> errors(tuples.size());
    parallel_for(tuples.size(), workers, [&](std::size_t t) {
        try {
            fold_scores[t] = scorer(tuples[t], t);
        } catch (const std::exception& e) {
            errors[t] = e.what();
        }
    });

    SearchResult result;
    for (const ParamAxis& axis : space.axes) result.axis_names.push_back(axis.name);

    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_id = tuples.size();
    std::size_t failed = 0;
    for (std::size_t t = 0; t < tuples.size(); ++t) {
        if (!errors[t].empty()) {
            ++failed;
            result.table.push_back(ScoreRow{t, tuples[t], 0,
                                            std::numeric_limits<double>::quiet_NaN()});
            continue;
        }
        double sum = 0.0;
        for (std::size_t f = 0; f < fold_scores[t].size(); ++f) {
            result.table.push_back(ScoreRow{t, tuples[t], f, fold_scores[t][f]});
            sum += fold_scores[t][f];
        }
        const double mean = sum / static_cast<double>(fold_scores[t].size());
        if (mean > best) {
            best = mean;
            best_id = t;
        }
    }
    if (failed == tuples.size()) {
        throw TuningError("search: every tuple failed; first: " + errors[0]);
    }

    result.best = tuples[best_id];
    result.best_id = best_id;
    result.best_score = best;
    result.on_boundary = tuple_on_boundary(space, result.best, mode);
    return result;
}

void write_score_table_csv(const SearchResult& result, std::ostream& out) {
    out << "tuple_id,params,fold,score\n";
    char buf[64];
    for (const ScoreRow& row : result.table) {
        out << row.tuple_id << ",";
        for (std::size_t a = 0; a < row.tuple.size(); ++a) {
            std::snprintf(buf, sizeof(buf), "%s%s=%.9g", a ? ";" : "",
                          result.axis_names[a].c_str(), row.tuple[a]);
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), ",%zu,%.9g\n", row.fold, row.score);
        out << buf;
    }
}

} // namespace puforge
