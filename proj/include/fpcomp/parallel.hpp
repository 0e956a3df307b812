#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fpcomp {

// Execution mode for the replicate/sample fan-out kernels. Every parallel
// kernel writes into slots indexed by its loop counter and is reduced in
// index order afterwards, so serial and openmp produce identical bytes.
enum class Exec { serial, openmp };

inline int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_worker_count(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

template <class Fn>
void for_each_index(Exec exec, std::int64_t n, Fn&& fn) {
    if (exec == Exec::openmp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
#endif
    }
    for (std::int64_t i = 0; i < n; ++i) fn(i);
}

}  // namespace fpcomp
