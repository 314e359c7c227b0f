// OpenMP kernels against their serial reference versions.

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "eaxedo/crossover.hpp"
#include "eaxedo/diversity.hpp"
#include "eaxedo/harness.hpp"
#include "eaxedo/instance.hpp"
#include "eaxedo/tour.hpp"

using namespace eaxedo;

namespace {

TspInstance synthetic(std::size_t n) {
    Rng rng(n);
    std::uniform_real_distribution<double> u(0.0, 10000.0);
    std::vector<Point> pts(n);
    for (auto& p : pts) p = {u(rng), u(rng)};
    return TspInstance("bench" + std::to_string(n), std::move(pts), EdgeWeightKind::Euc2d);
}

std::vector<Tour> tours_for(const TspInstance& inst, std::size_t mu) {
    Rng rng(7);
    const Tour base = random_tour(inst, rng);
    std::vector<Tour> out;
    Tour t = base;
    for (std::size_t i = 0; i < mu; ++i) {
        for (int k = 0; k < 20; ++k) t = two_opt_move(t, inst, rng);
        out.push_back(t);
    }
    return out;
}

IntermediateSolution split(const TspInstance& inst) {
    std::vector<NodeId> perm(inst.size());
    std::iota(perm.begin(), perm.end(), 0);
    const auto half = static_cast<long>(perm.size() / 2);
    return IntermediateSolution::from_cycles({{perm.begin(), perm.begin() + half}, {perm.begin() + half, perm.end()}},
                                             inst);
}

template <bool Parallel>
void BM_nn_lists(benchmark::State& st) {
    const TspInstance inst = synthetic(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        auto nn = Parallel ? build_nn_lists(inst, 10) : reference::build_nn_lists(inst, 10);
        benchmark::DoNotOptimize(nn);
    }
}

template <bool Parallel>
void BM_pairwise(benchmark::State& st) {
    const TspInstance inst = synthetic(static_cast<std::size_t>(st.range(0)));
    const auto tours = tours_for(inst, 50);
    for (auto _ : st) {
        auto d = Parallel ? pairwise_differences(tours) : reference::pairwise_differences(tours);
        benchmark::DoNotOptimize(d);
    }
}

template <bool Parallel>
void BM_removal_deltas(benchmark::State& st) {
    const TspInstance inst = synthetic(static_cast<std::size_t>(st.range(0)));
    const Population pop(tours_for(inst, 51));
    for (auto _ : st) {
        auto d = Parallel ? pop.removal_deltas() : reference::removal_deltas(pop);
        benchmark::DoNotOptimize(d);
    }
}

template <bool Parallel>
void BM_search_b(benchmark::State& st) {
    const TspInstance inst = synthetic(static_cast<std::size_t>(st.range(0)));
    const Population pop(tours_for(inst, 50));
    const IntermediateSolution t = split(inst);
    const Weight c_max = t.cost() * 2;
    for (auto _ : st) {
        auto r = Parallel ? best_search_b(t, pop.freq(), pop.total_directed(), c_max, inst)
                          : reference::best_search_b(t, pop.freq(), pop.total_directed(), c_max, inst);
        benchmark::DoNotOptimize(r);
    }
}

template <bool Parallel>
void BM_robustness(benchmark::State& st) {
    const TspInstance inst = synthetic(static_cast<std::size_t>(st.range(0)));
    const auto tours = tours_for(inst, 50);
    for (auto _ : st) {
        auto r = Parallel ? robustness_eval(tours, tours.front(), 1, 1000, 3)
                          : reference::robustness_eval(tours, tours.front(), 1, 1000, 3);
        benchmark::DoNotOptimize(r);
    }
}

}  // namespace

BENCHMARK(BM_nn_lists<true>)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_nn_lists<false>)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pairwise<true>)->Arg(101)->Arg(575)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_pairwise<false>)->Arg(101)->Arg(575)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_removal_deltas<true>)->Arg(101)->Arg(575)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_removal_deltas<false>)->Arg(101)->Arg(575)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_search_b<true>)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_search_b<false>)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_robustness<true>)->Arg(101)->Arg(575)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_robustness<false>)->Arg(101)->Arg(575)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
