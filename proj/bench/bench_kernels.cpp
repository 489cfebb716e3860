// Serial reference vs OpenMP cell kernels on the two sweeps that dominate a
// run: pairings over (probe, eps) and Fock-space transitions over (eps, t).
//
//   ./build/bench/genfn_bench --benchmark_counters_tabular=true

#include <benchmark/benchmark.h>

#include "genfn/asymptotics.hpp"
#include "genfn/embedding.hpp"
#include "genfn/kernels.hpp"
#include "genfn/qft_toy.hpp"
#include "genfn/quadrature.hpp"

using namespace genfn;

namespace {

struct PairingSweep {
    GenFunction u;
    std::vector<TestFunction> suite = standard_test_suite(8, 1);
    std::vector<double> eps = EpsilonGrid{}.values();

    PairingSweep() : u(make()) {}
    static GenFunction make() {
        const auto h = embed_heaviside(parse_mollifier("bump"));
        return h * h - h;
    }
    std::size_t cells() const { return suite.size() * eps.size(); }
    double operator()(std::size_t c) const {
        return pair(u, suite[c / eps.size()], Epsilon(eps[c % eps.size()]));
    }
};

qft::TransitionProblem quartic(int dim) {
    qft::TransitionProblem p;
    p.name = "quartic";
    p.fock = {dim, 1.0};
    p.interaction.potential = qft::Potential::polynomial({0, 0, 0, 0, 1});
    p.interaction.coupling = GenNumber::log_inverse(0.1);
    p.initial = qft::StateVector::basis(dim, 0);
    p.final_state = qft::StateVector::basis(dim, 0);
    p.time = 1.0;
    return p;
}

template <bool Parallel>
void BM_pairings(benchmark::State& state) {
    const PairingSweep sweep;
    for (auto _ : state) {
        auto out = Parallel ? kernels::map_cells(sweep.cells(), sweep) : kernels::serial::map_cells(sweep.cells(), sweep);
        benchmark::DoNotOptimize(out.data());
    }
    state.counters["cells"] = static_cast<double>(sweep.cells());
    state.counters["threads"] = Parallel ? kernels::max_threads() : 1;
}

template <bool Parallel>
void BM_transitions(benchmark::State& state) {
    const auto problem = quartic(static_cast<int>(state.range(0)));
    const auto eps = EpsilonGrid{}.values();
    auto cell = [&](std::size_t i) { return qft::transition_probability(problem, Epsilon(eps[i])); };
    for (auto _ : state) {
        auto out = Parallel ? kernels::map_cells(eps.size(), cell) : kernels::serial::map_cells(eps.size(), cell);
        benchmark::DoNotOptimize(out.data());
    }
    state.counters["threads"] = Parallel ? kernels::max_threads() : 1;
}

}  // namespace

BENCHMARK(BM_pairings<false>)->Name("pairings/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pairings<true>)->Name("pairings/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_transitions<false>)->Name("transitions/serial")->Arg(20)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_transitions<true>)->Name("transitions/openmp")->Arg(20)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
