// Microbenchmarks for the per-subframe hot paths and a shortened full run.

#include "dude/deployment.hpp"
#include "dude/engine.hpp"
#include "dude/radio.hpp"
#include "dude/scheduler.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace
{

using namespace dude;

void
BM_ScheduleCell(benchmark::State& state)
{
    const auto n = static_cast<std::uint32_t>(state.range(0));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pl(80.0, 130.0);
    std::vector<SchedulingCandidate> candidates;
    PfState pf;
    for (std::uint32_t u = 0; u < n; ++u)
    {
        const double l = pl(rng);
        candidates.push_back({u, 100, l, l + 5.0, DbToLinear(4.0 - l)});
        pf.Ensure(u);
    }
    const auto pc = PowerControlConfig::InterferenceAware();
    const LinkBudget link;
    for (auto _ : state)
    {
        auto grants = ScheduleCell(candidates, pf, pc, link, 1e-12);
        benchmark::DoNotOptimize(grants);
    }
}
BENCHMARK(BM_ScheduleCell)->Arg(1)->Arg(8)->Arg(32)->Arg(100);

void
BM_AccumulateInterference(benchmark::State& state)
{
    const std::size_t cells = 26;
    const int prbs = 100;
    const auto txCount = static_cast<std::size_t>(state.range(0));
    std::vector<double> gains(txCount * cells, 1e-12);
    std::vector<Transmission> schedule;
    for (std::size_t i = 0; i < txCount; ++i)
    {
        const int len = prbs / 4;
        schedule.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i % cells),
                            static_cast<int>(i % 4) * len, len, 1.0,
                            std::span<const double>(gains.data() + i * cells, cells)});
    }
    InterferenceField field(cells, prbs);
    for (auto _ : state)
    {
        AccumulateInterference(schedule, field);
        benchmark::DoNotOptimize(field.At(0, 0));
    }
}
BENCHMARK(BM_AccumulateInterference)->Arg(26)->Arg(104);

void
BM_EngineRun(benchmark::State& state)
{
    SimConfig cfg;
    cfg.subframes = 2000;
    cfg.warmupSubframes = 200;
    cfg.traceUeSubframes = false;
    cfg.pc = PowerControlConfig::InterferenceAware();
    const auto scenario = GenerateScenario(cfg.seed, cfg.scenario);
    for (auto _ : state)
    {
        auto log = Run(cfg, scenario);
        benchmark::DoNotOptimize(log.flows.size());
    }
    state.SetItemsProcessed(state.iterations() * cfg.subframes);
}
BENCHMARK(BM_EngineRun)->Unit(benchmark::kMillisecond);

void
BM_GenerateScenario(benchmark::State& state)
{
    const ScenarioParams params;
    std::uint64_t seed = 1;
    for (auto _ : state)
    {
        auto s = GenerateScenario(seed++, params);
        benchmark::DoNotOptimize(s.cells.size());
    }
}
BENCHMARK(BM_GenerateScenario)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
