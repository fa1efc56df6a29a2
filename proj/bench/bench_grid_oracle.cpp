#include "tpdareach/tpda.hpp"

#include <benchmark/benchmark.h>

using namespace tpdareach;

namespace {

// Two clocks racing against a stack of ages; enough branching to keep the
// frontier wide.
tpda::Tpda workload() {
    using tpda::TpdaOp;
    tpda::Tpda t;
    t.states = {"p", "q", "r", "s"};
    t.init = "p";
    t.clocks = {"x", "y"};
    t.alphabet = {"a", "b"};
    t.rules = {{"p", TpdaOp::push("a", Interval::closed(0, 2)), "q"},
               {"q", TpdaOp::reset("x", Interval::closed(0, 1)), "r"},
               {"r", TpdaOp::test("y", Interval{1, false, 3, false}), "p"},
               {"q", TpdaOp::push("b", Interval{1, true, 2, false}), "r"},
               {"r", TpdaOp::pop("a", Interval::at_least(1)), "s"},
               {"s", TpdaOp::pop("b", Interval::closed(0, 3)), "q"}};
    return t;
}

void BM_GridOracleParallel(benchmark::State &state) {
    const tpda::IndexedTpda t(workload());
    tpda::GridOracleOptions opts{static_cast<std::size_t>(state.range(0)), 4, std::nullopt};
    for (auto _ : state)
        benchmark::DoNotOptimize(tpda::grid_oracle(t, opts));
}

void BM_GridOracleSerial(benchmark::State &state) {
    const tpda::IndexedTpda t(workload());
    tpda::GridOracleOptions opts{static_cast<std::size_t>(state.range(0)), 4, std::nullopt};
    for (auto _ : state)
        benchmark::DoNotOptimize(tpda::grid_oracle_serial(t, opts));
}

} // namespace

BENCHMARK(BM_GridOracleParallel)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridOracleSerial)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
