#include <benchmark/benchmark.h>

#include "mpelab/clearing/equilibrium.hpp"
#include "mpelab/clearing/influence.hpp"
#include "mpelab/clearing/ttc.hpp"
#include "mpelab/lab/catalog.hpp"
#include "mpelab/mechanism/assign.hpp"
#include "mpelab/mechanism/mechanism.hpp"
#include "mpelab/oracle/oracle.hpp"
#include "mpelab/population/sampling.hpp"
#include "mpelab/welfare/mpe.hpp"

using namespace mpelab;

namespace {

const char* kScenarios[] = {"rationing", "price_cutoff", "auction_fixed_q", "auction_myerson", "two_school"};

void BM_ClearingSolve(benchmark::State& state)
{
    const auto spec = lab::catalog_scenario(kScenarios[state.range(0)]);
    population::Population pop(spec, {});
    mechanism::ReportDistribution d(pop);
    const auto mech = mechanism::make_mechanism(spec.mechanism);
    for (auto _ : state) benchmark::DoNotOptimize(clearing::solve_equilibrium(*mech, d, spec.conduct).c);
    state.SetLabel(spec.id);
}
BENCHMARK(BM_ClearingSolve)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_BuildModel(benchmark::State& state)
{
    const auto spec = lab::catalog_scenario(kScenarios[state.range(0)]);
    population::Population pop(spec, {});
    for (auto _ : state) benchmark::DoNotOptimize(welfare::build_model(pop));
    state.SetLabel(spec.id);
}
BENCHMARK(BM_BuildModel)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_SturmLiouville(benchmark::State& state)
{
    const auto spec = lab::catalog_scenario("auction_myerson");
    population::Population pop(spec, {});
    mechanism::ReportDistribution d(pop);
    const auto mech = mechanism::make_mechanism(spec.mechanism);
    const double c0 = clearing::solve_equilibrium(*mech, d, spec.conduct).c[0];
    for (auto _ : state)
        benchmark::DoNotOptimize(clearing::sturm_liouville_representer(d, c0, static_cast<int>(state.range(0))).values());
}
BENCHMARK(BM_SturmLiouville)->RangeMultiplier(2)->Range(1024, 8192)->Unit(benchmark::kMillisecond);

void BM_FdMpe(benchmark::State& state)
{
    const auto spec = lab::catalog_scenario(kScenarios[state.range(0)]);
    population::Population pop(spec, {});
    const auto s = population::make_policy_score(spec.scores.at(0), spec.policy_law, 256);
    for (auto _ : state) benchmark::DoNotOptimize(oracle::fd_mpe(pop, {}, s).value);
    state.SetLabel(spec.id);
}
BENCHMARK(BM_FdMpe)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_SampleAndAssign(benchmark::State& state)
{
    const auto spec = lab::catalog_scenario("auction_fixed_q");
    population::Population pop(spec, {});
    const auto model = welfare::build_model(pop);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto agents = population::sample_population(spec, n, 1);
        mechanism::assign(*model->mech, agents, model->state.c, *model->d, spec.outcome_law, 2);
        benchmark::DoNotOptimize(agents.y.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleAndAssign)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_TtcSimulation(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(clearing::simulate_ttc_cutoffs(0.6, 0.2, 0.2, static_cast<std::size_t>(state.range(0)), 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TtcSimulation)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
