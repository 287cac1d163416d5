// Runs n independent jobs either serially or with an OpenMP parallel-for.
// Each job writes only to its own slot, so the two paths must produce
// bit-identical results; the serial path is kept as the reference.
#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <stdexcept>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace rod {

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& job,
                         bool parallel = true) {
#if defined(_OPENMP)
    if (parallel) {
        std::exception_ptr first_error = nullptr;
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            try {
                job(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical
                if (!first_error) first_error = std::current_exception();
            }
        }
        if (first_error) std::rethrow_exception(first_error);
        return;
    }
#else
    (void)parallel;
#endif
    for (std::size_t i = 0; i < n; ++i) job(i);
}

inline int worker_count() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace rod
