#include <benchmark/benchmark.h>

#include <algorithm>
#include <string>

#include "rooflinebench/ingest.hpp"
#include "rooflinebench/profile_io.hpp"
#include "rooflinebench/report.hpp"

using namespace rooflinebench;

namespace {

std::string data(const std::string& rel) { return read_text_file(std::string(ROOFLINEBENCH_BENCH_DATA_DIR) + "/" + rel); }

// A llama-bench document with `rows` generation rows of distinct shapes.
std::string llama_bench_doc(int rows) {
    std::string s = "[";
    for (int i = 0; i < rows; ++i) {
        if (i) s += ",";
        s += R"({"model_type":"qwen2 1.5B F16","model_n_params":1543714304,"n_prompt":)" + std::to_string(i) +
             R"(,"n_gen":128,"test":"tg128","avg_ts":50.5,"stddev_ts":0.3,"backends":"Metal",)"
             R"("gpu_info":"Apple M1 Pro","build_commit":"b4b9d6d","test_time":"2025-01-01T00:00:00Z"})";
    }
    return s + "]";
}

void BM_ParseLlamaBench(benchmark::State& state) {
    const std::string doc = llama_bench_doc(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(parse_llama_bench(doc));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * doc.size()));
}
BENCHMARK(BM_ParseLlamaBench)->Arg(1)->Arg(1000);

void BM_ParseProfileCatalog(benchmark::State& state) {
    const std::string doc = data("hardware_catalog.json");
    for (auto _ : state) benchmark::DoNotOptimize(parse_profile_document(doc));
}
BENCHMARK(BM_ParseProfileCatalog);

void BM_RenderChart(benchmark::State& state) {
    ChartSpec c;
    c.title = "bench";
    c.ceilings.push_back({"measured", 120.03, 4610.0, Basis::Measured});
    c.ceilings.push_back({"theoretical", 204.8, 5200.0, Basis::Theoretical});
    for (std::int64_t i = 0; i < state.range(0); ++i) {
        RooflinePoint p;
        p.oi = 0.5 + static_cast<double>(i % 97);
        p.perf_gflops = std::min(4000.0, p.oi * 100.0);
        p.label = "p" + std::to_string(i);
        p.scenario = "SISO";
        c.points.push_back({p, static_cast<std::size_t>(i % 2)});
    }
    c.phi_annotations = true;
    for (auto _ : state) benchmark::DoNotOptimize(render_chart(c));
}
BENCHMARK(BM_RenderChart)->Arg(10)->Arg(1000);

}  // namespace
