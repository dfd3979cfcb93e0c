#include <benchmark/benchmark.h>

#include "rooflinebench/arch_io.hpp"
#include "rooflinebench/roofline.hpp"

using namespace rooflinebench;

namespace {

ArchConfig qwen() {
    static const ArchConfig a =
        load_arch(std::string(ROOFLINEBENCH_BENCH_DATA_DIR) + "/arch_catalog.json", "Qwen2.5-1.5B");
    return a;
}

void BM_DecodeStepCost(benchmark::State& state) {
    const ArchConfig a = qwen();
    const CostOptions o;
    const auto n = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(decode_step_cost(a, n, Precision::fp16(), Precision::fp16(), o));
    }
}
BENCHMARK(BM_DecodeStepCost)->Arg(1)->Arg(4096)->Arg(131072);

void BM_PrefillCost(benchmark::State& state) {
    const ArchConfig a = qwen();
    const CostOptions o;
    for (auto _ : state) {
        benchmark::DoNotOptimize(prefill_cost(a, state.range(0), Precision::q8_0(), Precision::fp16(), o));
    }
}
BENCHMARK(BM_PrefillCost)->Arg(512)->Arg(8192);

void BM_Phi(benchmark::State& state) {
    RidgePoint r;
    r.peak_gflops = 4610.0;
    r.bandwidth_gbps = 120.03;
    r.oi = r.peak_gflops / r.bandwidth_gbps;
    RooflinePoint p;
    p.oi = 1.0;
    p.perf_gflops = 100.0;
    const auto space = static_cast<PhiSpace>(state.range(0));
    for (auto _ : state) {
        p.oi = p.oi < 100.0 ? p.oi * 1.01 : 1.0;
        benchmark::DoNotOptimize(phi(p, r, space));
    }
}
BENCHMARK(BM_Phi)->Arg(0)->Arg(1);

}  // namespace
