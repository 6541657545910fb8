#ifndef PUFORGE_KERNEL_HPP
#define PUFORGE_KERNEL_HPP

#include "puforge/dataset.hpp"

#include <cstddef>
#include <list>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace puforge {

struct KernelSpec {
    enum class Kind { Linear, Rbf };
    Kind kind = Kind::Rbf;
    double gamma = 1.0; // RBF only, must be > 0

    static KernelSpec linear() { return {Kind::Linear, 0.0}; }
    static KernelSpec rbf(double gamma) { return {Kind::Rbf, gamma}; }
};

// Sparse dot product; accumulation order fixed by ascending feature index.
double sparse_dot(const Instance& a, const Instance& b);

// Linear: <a,b>. RBF: exp(-gamma*||a-b||^2) with the squared distance formed
// from cached self dots, aa + bb - 2ab.
double kernel_eval(const KernelSpec& spec, const Instance& a, const Instance& b);

// Bounded LRU cache of Gram rows keyed by row index. A mutex guards the map,
// so one cache may be shared by concurrent trainers; misses recompute
// redundantly at worst. Rows are immutable once published.
class GramRowCache {
public:
    explicit GramRowCache(std::size_t byte_budget) : byte_budget_(byte_budget) {}

    std::shared_ptr<const std::vector<double>> get(std::size_t row) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = map_.find(row);
        if (it == map_.end()) return nullptr;
        lru_.splice(lru_.begin(), lru_, it->second.lru_pos);
        return it->second.values;
    }

    void put(std::size_t row, std::shared_ptr<const std::vector<double>> values) {
        const std::size_t bytes = values->size() * sizeof(double);
        std::lock_guard<std::mutex> lock(mutex_);
        if (map_.count(row)) return;
        while (!lru_.empty() && used_bytes_ + bytes > byte_budget_) {
            auto victim = lru_.back();
            used_bytes_ -= map_[victim].values->size() * sizeof(double);
            map_.erase(victim);
            lru_.pop_back();
        }
        if (bytes > byte_budget_) return; // row larger than the whole budget
        lru_.push_front(row);
        map_[row] = Entry{std::move(values), lru_.begin()};
        used_bytes_ += bytes;
    }

    std::size_t hits() const { return hits_; }
    void count_hit() { ++hits_; }

private:
    struct Entry {
        std::shared_ptr<const std::vector<double>> values;
        std::list<std::size_t>::iterator lru_pos;
    };

    std::size_t byte_budget_;
    std::size_t used_bytes_ = 0;
    std::list<std::size_t> lru_;
    std::unordered_map<std::size_t, Entry> map_;
    std::mutex mutex_;
    std::size_t hits_ = 0;
};

// Row i of the Gram matrix over `data`, through the cache when one is given.
std::shared_ptr<const std::vector<double>> gram_row(const KernelSpec& spec, std::size_t i,
                                                    const std::vector<const Instance*>& data,
                                                    GramRowCache* cache);

} // namespace puforge

#endif
