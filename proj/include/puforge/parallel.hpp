#ifndef PUFORGE_PARALLEL_HPP
#define PUFORGE_PARALLEL_HPP

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace puforge {

// Resolve a worker-count request: 0 means "all hardware threads".
inline int resolve_workers(int workers) {
#ifdef _OPENMP
    if (workers <= 0) return omp_get_max_threads();
    return workers;
#else
    (void)workers;
    return 1;
#endif
}

// Index-parallel loop. workers == 1 runs the plain serial loop, which is the
// reference implementation the parallel path is tested against. Each index
// must write only to its own slots; results are then identical regardless of
// thread count or completion order.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    workers = resolve_workers(workers);
#ifdef _OPENMP
    if (workers > 1 && n > 1) {
        #pragma omp parallel for schedule(dynamic) num_threads(workers)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            fn(static_cast<std::size_t>(i));
        }
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

} // namespace puforge

#endif
