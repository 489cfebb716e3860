#pragma once

// Data-parallel cell evaluation. Every sweep in the library (eps grids,
// test-function suites, mollifier matrices, Fock dimensions) is a set of
// independent cells; these kernels evaluate them and return results in cell
// order, so output never depends on scheduling. The serial namespace holds
// the reference implementation the parallel one is tested against.

#include <cstddef>
#include <exception>
#include <span>
#include <type_traits>
#include <vector>

#ifdef GENFN_HAVE_OPENMP
#include <omp.h>
#endif

#include "genfn/gen_function.hpp"

namespace genfn::kernels {

inline int max_threads() {
#ifdef GENFN_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace serial {

template <class F>
auto map_cells(std::size_t n, F&& cell) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
    std::vector<std::invoke_result_t<F&, std::size_t>> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(cell(i));
    return out;
}

inline std::vector<double> sample_values(const GenNumber& g, std::span<const double> eps) {
    return map_cells(eps.size(), [&](std::size_t i) { return g.at(Epsilon(eps[i])); });
}

}  // namespace serial

/// Parallel map over cells 0..n-1. Exceptions thrown by cells are rethrown
/// after the loop, lowest cell index first.
template <class F>
auto map_cells(std::size_t n, F&& cell) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
    using T = std::invoke_result_t<F&, std::size_t>;
    static_assert(std::is_default_constructible_v<T>, "cell results must be default constructible");
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<long long>(n);
#ifdef GENFN_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (long long i = 0; i < count; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            out[idx] = cell(idx);
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

inline std::vector<double> sample_values(const GenNumber& g, std::span<const double> eps) {
    return map_cells(eps.size(), [&](std::size_t i) { return g.at(Epsilon(eps[i])); });
}

}  // namespace genfn::kernels
