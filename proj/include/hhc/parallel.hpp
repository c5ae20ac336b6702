#ifndef HHC_PARALLEL_HPP
#define HHC_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hhc {

// Index-parallel loop. Each body(i) must write only to slot i of
// preallocated output; under that contract results are independent of the
// thread count. threads <= 1 runs the plain serial loop.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& body) {
#ifdef _OPENMP
    if (threads > 1) {
        std::exception_ptr eptr = nullptr;
        std::mutex m;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
                std::lock_guard<std::mutex> lock(m);
                if (!eptr) eptr = std::current_exception();
            }
        }
        if (eptr) std::rethrow_exception(eptr);
        return;
    }
#endif
    (void)threads;
    for (std::size_t i = 0; i < n; ++i) body(i);
}

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace hhc

#endif
