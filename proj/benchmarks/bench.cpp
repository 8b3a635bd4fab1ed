#include "jsqldp/fluid.hpp"
#include "jsqldp/rare_event.hpp"
#include "jsqldp/ratefn.hpp"
#include "jsqldp/simulator.hpp"
#include "jsqldp/skorokhod.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace jsqldp;

namespace
{

SystemConfig jsq_config(std::int64_t n, double horizon)
{
    SystemConfig config;
    config.n = n;
    config.lambda = 0.95;
    config.horizon = horizon;
    config.init = InitialOccupancy::uniform_length(1);
    return config;
}

void BM_simulate_path(benchmark::State &state)
{
    const auto config = jsq_config(state.range(0), 5.0);
    std::uint64_t seed = 0;
    std::size_t events = 0;
    for (auto _ : state)
    {
        const auto path = simulate_path(config, ++seed);
        events += path.events();
        benchmark::DoNotOptimize(path.final_time);
    }
    state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_simulate_path)->Arg(100)->Arg(1000)->Arg(10000);

void BM_solve_sp(benchmark::State &state)
{
    const auto steps = static_cast<std::size_t>(state.range(0));
    const std::size_t m = 8;
    std::vector<double> times(steps);
    std::vector<std::vector<double>> values(m, std::vector<double>(steps));
    for (std::size_t i = 0; i < steps; ++i)
    {
        times[i] = static_cast<double>(i) * 1e-3;
        for (std::size_t k = 0; k < m; ++k)
            values[k][i] = 0.9 * std::sin(0.01 * static_cast<double>(i * (k + 1))) + 0.3;
    }
    const GridPath psi(std::move(times), std::move(values));
    for (auto _ : state)
    {
        auto sol = skorokhod::solve_sp(psi);
        benchmark::DoNotOptimize(sol.eta(m, steps - 1));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_solve_sp)->Arg(1000)->Arg(100000);

void BM_fluid_integrate(benchmark::State &state)
{
    const auto opt = ratefn::optimal_path(static_cast<std::size_t>(state.range(0)), 2.0);
    for (auto _ : state)
    {
        auto path = fluid::integrate(opt.control, InitialOccupancy::uniform_length(1), 2.0, 1e-4, 1.0);
        benchmark::DoNotOptimize(fluid::cost(opt.control, path, 1.0));
    }
}
BENCHMARK(BM_fluid_integrate)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_estimate_event(benchmark::State &state)
{
    const auto config = jsq_config(state.range(0), 2.0);
    const auto event = RareEventSpec::reach_length(3);
    std::uint64_t seed = 0;
    for (auto _ : state)
    {
        auto result = estimate_event(config, event, 1000, ++seed);
        benchmark::DoNotOptimize(result.p_hat);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 1000);
}
BENCHMARK(BM_estimate_event)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
