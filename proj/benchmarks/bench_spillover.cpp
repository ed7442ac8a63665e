#include <benchmark/benchmark.h>

#include "spillover/dgp.hpp"
#include "spillover/estimators.hpp"
#include "spillover/oracle.hpp"
#include "spillover/randomization.hpp"

using namespace spillover;

namespace {

NetworkDataset network(std::size_t n) {
    NetworkDgpConfig cfg;
    cfg.n = n;
    cfg.h = 1;
    cfg.c = 0.5;
    cfg.seed = 1;
    return gen_network(cfg);
}

void BM_GenNetwork(benchmark::State& state) {
    NetworkDgpConfig cfg;
    cfg.n = static_cast<std::size_t>(state.range(0));
    cfg.h = 1;
    for (auto _ : state) {
        ++cfg.seed;
        benchmark::DoNotOptimize(gen_network(cfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenNetwork)->Arg(400)->Arg(1600)->Arg(100000);

void BM_Fit(benchmark::State& state) {
    const auto ds = network(static_cast<std::size_t>(state.range(1)));
    const auto m = ds.exposures(ExposureMap::Identity);
    const auto d = to_double(ds.d), z = to_double(ds.d1), a1 = to_double(*ds.a1);
    const auto method = static_cast<Method>(state.range(0));
    for (auto _ : state) {
        if (method == Method::OLS)
            benchmark::DoNotOptimize(ols_fit(ds.y, d, m));
        else if (method == Method::TSLS)
            benchmark::DoNotOptimize(tsls_fit(ds.y, d, m, z));
        else
            benchmark::DoNotOptimize(wls_fit(ds.y, d, m, z, a1));
    }
    state.SetLabel(to_string(method));
    state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_Fit)->ArgsProduct({{0, 1, 2}, {1600, 100000}});

void BM_FrtDraws(benchmark::State& state) {
    const auto ds = network(static_cast<std::size_t>(state.range(0)));
    const Statistic stats[] = {Statistic::TSLS, Statistic::WLS, Statistic::ITT, Statistic::ITTC};
    FrtOptions opts;
    opts.b = 500;
    opts.p1j = 0.5;
    opts.workers = 1;
    for (auto _ : state) {
        ++opts.seed;
        benchmark::DoNotOptimize(frt_multi(ds, stats, opts));
    }
    state.SetItemsProcessed(state.iterations() * opts.b);
}
BENCHMARK(BM_FrtDraws)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_PairEnumerate(benchmark::State& state) {
    const auto spec = random_pair_spec(3, 7);
    for (auto _ : state) benchmark::DoNotOptimize(pair_closed_forms(spec));
}
BENCHMARK(BM_PairEnumerate);

void BM_NetworkEnumerate(benchmark::State& state) {
    const auto spec = random_network_spec(3, 7, static_cast<int>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(network_closed_forms(spec, ExposureMap::Identity));
}
BENCHMARK(BM_NetworkEnumerate)->Arg(2)->Arg(8);

}  // namespace

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
