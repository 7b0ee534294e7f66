// Worker-count control and deterministic map/reduce helpers.
//
// Parallel kernels evaluate independent terms into an indexed buffer and
// reduce serially in index order, so results are bit-identical for any
// thread count. The *_serial variants are the plain-loop reference
// implementations kept for testing and benchmarking.
#ifndef CASIMIR_PARALLEL_HPP
#define CASIMIR_PARALLEL_HPP

#include <cstddef>
#include <type_traits>
#include <vector>

namespace casimir {

void set_threads(int n);   // n <= 1 forces serial execution
int threads();

namespace detail {
void parallel_apply(std::size_t n, void* ctx, void (*fn)(void*, std::size_t));
}

// Evaluates f(i) for i in [0, n), possibly concurrently.
template <class F>
void parallel_for(std::size_t n, F&& f) {
    using Fn = std::remove_reference_t<F>;
    detail::parallel_apply(n, static_cast<void*>(&f), [](void* ctx, std::size_t i) {
        (*static_cast<Fn*>(ctx))(i);
    });
}

// sum_{i<n} f(i), evaluated in parallel, reduced in index order.
template <class F>
double indexed_sum(std::size_t n, F&& f) {
    std::vector<double> terms(n);
    parallel_for(n, [&](std::size_t i) { terms[i] = f(i); });
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += terms[i];
    return s;
}

// Reference path: same reduction order, no threading.
template <class F>
double indexed_sum_serial(std::size_t n, F&& f) {
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) terms[i] = f(i);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += terms[i];
    return s;
}

} // namespace casimir

#endif
