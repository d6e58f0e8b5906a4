#pragma once

#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace conepath::detail {

/// Runs fn(i) for i in [0, n) across OpenMP threads. Iterations must be
/// independent; the first exception thrown by any iteration is rethrown.
template <typename Fn>
void parallel_for(std::ptrdiff_t n, Fn&& fn) {
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            fn(i);
        } catch (...) {
#pragma omp critical(conepath_parallel_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

inline int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace conepath::detail
