#include "casimir/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace casimir {

namespace {
int g_threads = 0; // 0 = library default (all hardware threads)
}

void set_threads(int n) { g_threads = n; }

int threads() {
#ifdef _OPENMP
    if (g_threads <= 0) return omp_get_max_threads();
    return g_threads;
#else
    return 1;
#endif
}

namespace detail {

void parallel_apply(std::size_t n, void* ctx, void (*fn)(void*, std::size_t)) {
    const int nt = threads();
#ifdef _OPENMP
    if (nt > 1 && n > 1) {
#pragma omp parallel for schedule(static) num_threads(nt)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            fn(ctx, static_cast<std::size_t>(i));
        return;
    }
#else
    (void)nt;
#endif
    for (std::size_t i = 0; i < n; ++i) fn(ctx, i);
}

} // namespace detail
} // namespace casimir
