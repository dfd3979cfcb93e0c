#include <gtest/gtest.h>

#include <fmt/format.h>

#include <random>

#include "rooflinebench/arch_io.hpp"
#include "rooflinebench/error.hpp"
#include "rooflinebench/ingest.hpp"
#include "support.hpp"

using namespace rooflinebench;

namespace {

std::string row(const std::string& test, int np, int ng, double ts, const std::string& model = "qwen2 1.5B F16",
                long long params = 1543714304) {
    return fmt::format(R"({{"model_type":"{}","model_n_params":{},"n_prompt":{},"n_gen":{},"test":"{}",
        "avg_ts":{},"stddev_ts":0.5,"backends":"Metal","gpu_info":"Apple M1 Pro","cpu_info":"Apple M1 Pro",
        "build_commit":"abc","test_time":"2025-01-01T00:00:00Z","n_threads":8}})",
                       model, params, np, ng, test, ts);
}

ArchConfig qwen() { return load_arch(testing_support::data_dir() / "arch_catalog.json", "Qwen2.5-1.5B"); }

}  // namespace

TEST(LlamaBench, GenerationRowPopulatesDecode) {
    const ParseReport r = parse_llama_bench("[" + row("tg64", 0, 64, 50.0) + "]");
    ASSERT_TRUE(r.errors.empty());
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].decode_tps, 50.0);
    EXPECT_FALSE(r.records[0].prefill_tps.has_value());
    EXPECT_EQ(r.records[0].quant_label, "F16");
    EXPECT_EQ(r.records[0].backend, "Metal");
    EXPECT_EQ(r.records[0].device, "Apple M1 Pro");
}

TEST(LlamaBench, EmptyArray) {
    const ParseReport r = parse_llama_bench("[]");
    EXPECT_TRUE(r.records.empty());
    EXPECT_TRUE(r.errors.empty());
}

TEST(LlamaBench, MalformedRowIsCollected) {
    const std::string bad = R"({"model_type":"qwen2 1.5B F16","model_n_params":1,"n_prompt":0,"n_gen":64})";
    const ParseReport r = parse_llama_bench("[" + row("tg64", 0, 64, 50.0) + "," + bad + "," +
                                            row("pp512", 512, 0, 1400.0) + "]");
    ASSERT_EQ(r.errors.size(), 1u);
    EXPECT_EQ(r.errors[0].row, 1u);
    EXPECT_NE(r.errors[0].message.find("avg_ts"), std::string::npos) << r.errors[0].message;
    EXPECT_EQ(r.records.size(), 2u);
}

TEST(LlamaBench, LabeledRowsMerge) {
    const ParseReport r = parse_llama_bench("[" + row("pp64", 64, 64, 1424.0) + "," + row("tg64", 64, 64, 50.0) + "]");
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].prefill_tps, 1424.0);
    EXPECT_EQ(r.records[0].decode_tps, 50.0);
}

TEST(LlamaBench, DuplicateAndAmbiguousRows) {
    const ParseReport dup = parse_llama_bench("[" + row("tg64", 0, 64, 50.0) + "," + row("tg64", 0, 64, 51.0) + "]");
    EXPECT_EQ(dup.records.size(), 1u);
    EXPECT_EQ(dup.errors.size(), 1u);
    const std::string unlabeled = R"({"model_type":"m F16","model_n_params":5,"n_prompt":8,"n_gen":8,"avg_ts":3})";
    const ParseReport amb = parse_llama_bench("[" + unlabeled + "]");
    EXPECT_TRUE(amb.records.empty());
    EXPECT_EQ(amb.errors.size(), 1u);
}

TEST(LlamaBench, NonArrayThrows) {
    EXPECT_THROW(parse_llama_bench(R"({"a":1})"), SchemaError);
    EXPECT_THROW(parse_llama_bench("[1,"), SchemaError);
}

// Random garbage rows never throw, and every input row is accounted for.
TEST(LlamaBench, PartialSuccessProperty) {
    std::mt19937_64 rng(99);
    const std::string pieces[] = {row("tg64", 0, 64, 50.0), row("pp64", 64, 0, 900.0), "1", "null", "{}",
                                  R"({"model_type":3})", R"({"model_type":"m","n_prompt":-1})",
                                  row("tg16", 0, 16, -2.0), row("xx", 1, 1, 1.0)};
    for (int trial = 0; trial < 200; ++trial) {
        std::string doc = "[";
        const int n = static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) {
            if (i) doc += ",";
            doc += pieces[rng() % std::size(pieces)];
        }
        doc += "]";
        ParseReport r;
        ASSERT_NO_THROW(r = parse_llama_bench(doc)) << doc;
        std::size_t merged_rows = 0;
        for (const auto& rec : r.records) merged_rows += rec.prefill_tps.has_value() + rec.decode_tps.has_value();
        EXPECT_EQ(merged_rows + r.errors.size(), static_cast<std::size_t>(n)) << doc;
    }
}

TEST(LlamaBench, FixtureParses) {
    const ParseReport r =
        parse_llama_bench(read_text_file(testing_support::fixture("llama_bench_qwen2.5-1.5b_f16_m1pro.json")));
    ASSERT_TRUE(r.errors.empty());
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].prefill_tps, 1424.0);
    EXPECT_EQ(r.records[0].decode_tps, 50.0);
    EXPECT_EQ(r.records[0].build_commit, "b4b9d6d");
}

TEST(Records, RoundTrip) {
    ParseReport r = parse_llama_bench("[" + row("pp64", 64, 64, 1424.0) + "," + row("tg64", 64, 64, 50.0) + "," +
                                      row("tg128", 0, 128, 48.25, "llama 1B Q8_0", 1235814400) + "]");
    r.records[0].memory = MemorySummary{3.3e9, 3.2e9, 40};
    EXPECT_EQ(records_from_json(records_to_json(r.records)), r.records);
}

TEST(Scenario, DefaultBoundary) {
    const ScenarioThresholds t;
    EXPECT_EQ(classify_scenario(64, 64, t), Scenario::SISO);
    EXPECT_EQ(classify_scenario(2048, 64, t), Scenario::LISO);
    EXPECT_EQ(classify_scenario(0, 64, t), Scenario::SISO);
    EXPECT_EQ(classify_scenario(64, 2048, t), Scenario::SILO);
    EXPECT_EQ(classify_scenario(512, 513, t), Scenario::SILO);
    EXPECT_EQ(classify_scenario(513, 4096, t), Scenario::LILO);
}

TEST(Scenario, PartitionIsTotal) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        const auto b = static_cast<std::int64_t>(1 + rng() % 4096);
        const auto np = static_cast<std::int64_t>(rng() % 8192), ng = static_cast<std::int64_t>(rng() % 8192);
        const Scenario s = classify_scenario(np, ng, thresholds_from_boundary(b));
        const bool long_in = np > b, long_out = ng > b;
        const Scenario want = long_in ? (long_out ? Scenario::LILO : Scenario::LISO)
                                      : (long_out ? Scenario::SILO : Scenario::SISO);
        EXPECT_EQ(s, want);
    }
}

TEST(MemoryTrace, Examples) {
    auto single = parse_memory_trace("timestamp_ms,rss_bytes\n0,1000\n");
    EXPECT_EQ(single.summary.peak_bytes, 1000.0);
    EXPECT_EQ(single.summary.steady_bytes, 1000.0);
    EXPECT_EQ(single.summary.samples, 1);
    auto four = parse_memory_trace("timestamp_ms,rss_bytes\n0,1000\n1,2000\n2,3000\n3,3000\n");
    EXPECT_EQ(four.summary.peak_bytes, 3000.0);
    EXPECT_EQ(four.summary.steady_bytes, 3000.0);
    EXPECT_THROW(parse_memory_trace("timestamp_ms,rss_bytes\n"), SchemaError);
    try {
        (void)parse_memory_trace("timestamp_ms,rss_bytes\n");
    } catch (const SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find("no samples"), std::string::npos);
    }
}

TEST(MemoryTrace, WarningsDoNotAbort) {
    auto t = parse_memory_trace("timestamp_ms,rss_bytes\n0,1000\n5,abc\n4,1100\n3,900\n");
    EXPECT_EQ(t.summary.samples, 3);
    EXPECT_EQ(t.warnings.size(), 2u);  // bad cell and backwards timestamp
    EXPECT_LE(t.summary.steady_bytes, t.summary.peak_bytes);
    EXPECT_THROW(parse_memory_trace("time,rss\n0,1\n"), SchemaError);
}

TEST(Join, FixtureApproxDecodePerformance) {
    const ParseReport r =
        parse_llama_bench(read_text_file(testing_support::fixture("llama_bench_qwen2.5-1.5b_f16_m1pro.json")));
    JoinOptions o;
    o.cost.mode = CostMode::Approx;
    const JoinResult j = join(r.records.at(0), qwen(), o);
    ASSERT_TRUE(j.decode_point.has_value());
    EXPECT_NEAR(j.decode_point->perf_gflops, 154.0, 1.54);
    EXPECT_EQ(j.scenario, Scenario::SISO);
    EXPECT_EQ(j.decode_point->scenario, "SISO");
    ASSERT_TRUE(j.prefill_point.has_value());
    EXPECT_GT(j.prefill_point->oi, j.decode_point->oi);
}

TEST(Join, OptionalDecode) {
    const ParseReport r = parse_llama_bench("[" + row("pp512", 512, 0, 1400.0) + "]");
    const JoinResult j = join(r.records.at(0), qwen(), JoinOptions{});
    EXPECT_FALSE(j.decode_point.has_value());
    EXPECT_TRUE(j.prefill_point.has_value());
}

TEST(Join, GuardsAgainstWrongModel) {
    ParseReport r = parse_llama_bench("[" + row("tg64", 0, 64, 50.0, "qwen2 0.5B F16", 500000000) + "]");
    try {
        (void)join(r.records.at(0), qwen(), JoinOptions{});
        FAIL();
    } catch (const JoinError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("500000000"), std::string::npos) << msg;
        EXPECT_NE(msg.find("1543714304"), std::string::npos) << msg;
    }
    r = parse_llama_bench("[" + row("tg64", 0, 64, 50.0, "qwen2 1.5B IQ2_XS") + "]");
    try {
        (void)join(r.records.at(0), qwen(), JoinOptions{});
        FAIL();
    } catch (const JoinError& e) {
        EXPECT_NE(std::string(e.what()).find("Q4_K_M"), std::string::npos) << e.what();
    }
}

TEST(Join, RegimeStableUnderUniformRescaling) {
    const ParseReport r =
        parse_llama_bench(read_text_file(testing_support::fixture("llama_bench_qwen2.5-1.5b_f16_m1pro.json")));
    const JoinResult j = join(r.records.at(0), qwen(), JoinOptions{});
    RidgePoint ridge;
    ridge.peak_gflops = 4610;
    ridge.bandwidth_gbps = 120.03;
    ridge.oi = 4610 / 120.03;
    for (double f : {1e-3, 0.5, 3.0, 1e4}) {
        const RooflinePoint p = to_point(j.decode_cost.scaled(f), 1.0 / 50.0);
        EXPECT_NEAR(p.oi, j.decode_point->oi, 1e-9 * j.decode_point->oi);
        EXPECT_EQ(classify(p.oi, ridge), classify(j.decode_point->oi, ridge));
    }
}

TEST(Join, ContextPositions) {
    const ArchConfig a = qwen();
    const CostOptions o;
    auto w = [&](DecodeContext c) {
        return representative_decode_cost(a, 100, 50, Precision::fp16(), Precision::fp16(), o, c).total_flops();
    };
    EXPECT_LT(w(DecodeContext::Start), w(DecodeContext::Mid));
    EXPECT_LT(w(DecodeContext::Mid), w(DecodeContext::End));
    // Work is linear in N, so the exact average equals the midpoint of steps np+1..np+ng.
    const double exact = w(DecodeContext::ExactIntegral);
    const double lo = decode_step_cost(a, 101, Precision::fp16(), Precision::fp16(), o).total_flops();
    const double hi = decode_step_cost(a, 150, Precision::fp16(), Precision::fp16(), o).total_flops();
    EXPECT_NEAR(exact, (lo + hi) / 2, 1e-9 * exact);
    EXPECT_EQ(parse_decode_context("exact"), DecodeContext::ExactIntegral);
}
