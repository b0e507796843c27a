#include <benchmark/benchmark.h>

#include "rdal/baselines.hpp"
#include "rdal/hypothesis.hpp"
#include "rdal/replicable.hpp"

namespace {

void BM_ThetaWorstCase(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto cls = rdal::HypothesisClass::worst_case(n);
    const auto model = rdal::DataModel::realizable(cls, rdal::DataModel::uniform_weights(n), 0);
    for (auto _ : state) benchmark::DoNotOptimize(rdal::disagreement_coefficient(cls, model, 0));
}
BENCHMARK(BM_ThetaWorstCase)->Arg(16)->Arg(64)->Arg(256);

void BM_ThetaThresholds(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto cls = rdal::HypothesisClass::thresholds(n);
    const auto model = rdal::DataModel::realizable(cls, rdal::DataModel::uniform_weights(n), n / 2);
    for (auto _ : state) benchmark::DoNotOptimize(rdal::disagreement_coefficient(cls, model, n / 2));
}
BENCHMARK(BM_ThetaThresholds)->Arg(128)->Arg(512);

struct Thresholds {
    rdal::HypothesisClass cls = rdal::HypothesisClass::thresholds(128);
    rdal::DataModel model = rdal::DataModel::realizable(cls, rdal::DataModel::uniform_weights(128), 64);
    rdal::Problem problem = rdal::make_problem(cls, model);
};

void BM_Cal(benchmark::State& state) {
    const Thresholds t;
    rdal::LearnerParams params;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        rdal::DataStream data(++seed);
        benchmark::DoNotOptimize(rdal::run_cal(t.problem, params, data));
    }
}
BENCHMARK(BM_Cal);

void BM_RepliCal(benchmark::State& state) {
    const Thresholds t;
    rdal::LearnerParams params;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        rdal::DataStream data(++seed);
        benchmark::DoNotOptimize(rdal::run_replical(t.problem, params, rdal::RandomString::from_hex("b"), data));
    }
}
BENCHMARK(BM_RepliCal)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
