#include <gtest/gtest.h>

#include <cmath>
#include <regex>
#include <sstream>

#include "rooflinebench/arch_io.hpp"
#include "rooflinebench/error.hpp"
#include "rooflinebench/report.hpp"
#include "support.hpp"

using namespace rooflinebench;

namespace {

SweepSpec base_spec(SweepAxis axis, const std::string& values) {
    SweepSpec s;
    s.axis = axis;
    s.values = parse_sweep_values(axis, values);
    s.arch = load_arch(testing_support::data_dir() / "arch_catalog.json", "Qwen2.5-1.5B");
    s.profile = testing_support::catalog_device("Apple M1 Pro");
    s.ceiling = ComputeKind::FP32;
    s.context = 1024;
    return s;
}

// Attribute value of the first element matching `selector_regex`.
double attr(const std::string& svg, const std::string& element_regex, const std::string& name) {
    std::smatch m;
    if (!std::regex_search(svg, m, std::regex(element_regex + "[^>]*>"))) {
        ADD_FAILURE() << "no element " << element_regex;
        return 0.0;
    }
    std::smatch a;
    const std::string tag = m.str();
    if (!std::regex_search(tag, a, std::regex(" " + name + "=\"([^\"]+)\""))) {
        ADD_FAILURE() << "no attribute " << name << " in " << tag;
        return 0.0;
    }
    return std::stod(a[1].str());
}

ChartSpec sample_chart() {
    ChartSpec c;
    c.title = "M1 Pro <fp16>";
    c.ceilings.push_back({"measured fp16", 120.03, 4610.0, Basis::Measured});
    c.ceilings.push_back({"theoretical fp32", 204.8, 5200.0, Basis::Theoretical});
    RooflinePoint a;
    a.oi = 1.0;
    a.perf_gflops = 100.0;
    a.label = "decode";
    a.scenario = "SISO";
    RooflinePoint b;
    b.oi = 400.0;
    b.perf_gflops = 2000.0;
    b.label = "prefill";
    b.scenario = "LISO";
    c.points.push_back({a, 0});
    c.points.push_back({b, 0});
    c.phi_annotations = true;
    return c;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(SweepValues, Syntax) {
    EXPECT_EQ(parse_sweep_values(SweepAxis::Layers, "2,4,8").size(), 3u);
    EXPECT_EQ(parse_sweep_values(SweepAxis::Layers, "2..5").size(), 4u);
    const auto doubling = parse_sweep_values(SweepAxis::ContextLength, "128..4096*2");
    ASSERT_EQ(doubling.size(), 6u);
    EXPECT_EQ(std::get<std::int64_t>(doubling.back()), 4096);
    const auto prec = parse_sweep_values(SweepAxis::Precision, "fp16,q8_0,q4_k_m");
    EXPECT_EQ(std::get<Precision>(prec[1]), Precision::q8_0());
    const auto sc = parse_sweep_values(SweepAxis::Scenario, "64:64,2048:64");
    EXPECT_EQ(std::get<ScenarioShape>(sc[1]).n_prompt, 2048);
    EXPECT_THROW(parse_sweep_values(SweepAxis::Layers, "2,,4"), ConfigError);
    EXPECT_THROW(parse_sweep_values(SweepAxis::Layers, "8..2"), ConfigError);
    EXPECT_THROW(parse_sweep_values(SweepAxis::Layers, "2..8*1"), ConfigError);
    EXPECT_THROW(parse_sweep_values(SweepAxis::Precision, "fp8"), ConfigError);
    EXPECT_EQ(parse_sweep_axis("context"), SweepAxis::ContextLength);
}

TEST(Sweep, PrecisionRaisesIntensityInWeightsOnlyMode) {
    SweepSpec s = base_spec(SweepAxis::Precision, "fp16,q8_0,q4_k_m");
    for (CostMode mode : {CostMode::Approx, CostMode::Detailed}) {
        s.cost = CostOptions::weights_only(FlopsConvention::Fma, mode);
        const auto pts = run_sweep(s);
        ASSERT_EQ(pts.size(), 3u);
        EXPECT_LT(pts[0].oi, pts[1].oi);
        EXPECT_LT(pts[1].oi, pts[2].oi);
        EXPECT_EQ(pts[1].label, "Q8_0");
    }
}

TEST(Sweep, LayerCountLeavesWeightsOnlyIntensityUnchanged) {
    SweepSpec s = base_spec(SweepAxis::Layers, "2,4,8,16,28,56");
    s.cost = CostOptions::weights_only(FlopsConvention::Fma, CostMode::Detailed);
    s.cost.embedding_weight_traffic = false;
    const auto pts = run_sweep(s);
    // Exact up to the integer rounding of per-layer parameter counts.
    for (const auto& p : pts) EXPECT_NEAR(p.oi, pts[0].oi, 1e-7 * pts[0].oi) << p.label;
}

TEST(Sweep, LayerCountWithKvMatchesDirectEvaluation) {
    SweepSpec s = base_spec(SweepAxis::Layers, "2,4,8");
    const auto pts = run_sweep(s);
    ASSERT_EQ(pts.size(), 3u);
    const std::int64_t layers[] = {2, 4, 8};
    const RidgePoint r = ridge(s.profile, s.ceiling, s.basis);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto c = decode_step_cost(scale_layers(s.arch, layers[i]), s.context, s.weights, s.kv, s.cost);
        const double oi = c.total_flops() / c.total_bytes();
        EXPECT_DOUBLE_EQ(pts[i].oi, oi);
        EXPECT_DOUBLE_EQ(pts[i].perf_gflops, attainable(r, oi));
        EXPECT_EQ(pts[i].provenance, Provenance::Predicted);
        EXPECT_EQ(pts[i].regime, classify(oi, r));
    }
    EXPECT_NE(pts[0].oi, pts[2].oi);
}

TEST(Sweep, ContextAndScenarioAxes) {
    const auto ctx = run_sweep(base_spec(SweepAxis::ContextLength, "128..8192*2"));
    for (std::size_t i = 1; i < ctx.size(); ++i) EXPECT_NE(ctx[i].oi, ctx[i - 1].oi);
    const auto sc = run_sweep(base_spec(SweepAxis::Scenario, "64:64,64:2048,2048:64,2048:2048"));
    ASSERT_EQ(sc.size(), 4u);
    EXPECT_EQ(sc[0].scenario, "SISO");
    EXPECT_EQ(sc[1].scenario, "SILO");
    EXPECT_EQ(sc[2].scenario, "LISO");
    EXPECT_EQ(sc[3].scenario, "LILO");
}

TEST(Sweep, ErrorsNameTheValue) {
    SweepSpec s = base_spec(SweepAxis::Layers, "4,0");
    try {
        (void)run_sweep(s);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("L=0"), std::string::npos) << e.what();
    }
}

TEST(Gaps, CatalogDevices) {
    const GapReport m1 = gap_analysis(testing_support::catalog_device("Apple M1 Pro"));
    ASSERT_TRUE(m1.bandwidth_gap_gbps.has_value());
    EXPECT_NEAR(*m1.bandwidth_gap_gbps, 84.77, 1e-9);
    EXPECT_FALSE(m1.compute.at(ComputeKind::FP16).gap_gflops.has_value());
    EXPECT_TRUE(m1.compute.at(ComputeKind::FP16).ridge_measured.has_value());
    const GapReport rtx = gap_analysis(testing_support::catalog_device("NVIDIA RTX 3090"));
    EXPECT_NEAR(*rtx.compute.at(ComputeKind::FP32).gap_gflops, 11300.0, 1e-9);
    // Measured fp16 exceeds the fp32-rate spec sheet on tensor-core parts: a signed gap.
    EXPECT_LT(*rtx.compute.at(ComputeKind::FP16).gap_gflops, 0.0);
    for (const auto& p : parse_profile_document(read_text_file(testing_support::data_dir() / "hardware_catalog.json"))) {
        const GapReport g = gap_analysis(p);
        ASSERT_TRUE(g.bandwidth_gap_gbps.has_value()) << p.name;
        EXPECT_GE(*g.bandwidth_gap_gbps, 0.0) << p.name;
    }
}

TEST(Gaps, MeasuredOnlyProfileHasNoGaps) {
    HardwareProfile p;
    p.name = "probe";
    p.bandwidth_gbps.measured = 30.0;
    p.peak_gflops[ComputeKind::FP32].measured = 200.0;
    const GapReport g = gap_analysis(p);
    EXPECT_FALSE(g.bandwidth_gap_gbps.has_value());
    EXPECT_FALSE(g.compute.at(ComputeKind::FP32).gap_gflops.has_value());
    const std::string js = gaps_to_json(g);
    EXPECT_NE(js.find("\"bandwidth_gap_gbps\": null"), std::string::npos) << js;
}

TEST(Chart, Deterministic) {
    const ChartSpec c = sample_chart();
    EXPECT_EQ(render_chart(c), render_chart(c));
    EXPECT_EQ(render_chart(chart_spec_from_json(chart_spec_to_json(c))), render_chart(c));
    const std::string svg = render_chart(c);
    EXPECT_NE(svg.find("M1 Pro &lt;fp16&gt;"), std::string::npos);
}

TEST(Chart, MemoryBoundPhiSegmentEndsAtRidge) {
    const ChartSpec c = sample_chart();
    const std::string svg = render_chart(c);
    const double x2 = attr(svg, "<line class=\"phi\" data-point=\"0\"", "x2");
    const double y2 = attr(svg, "<line class=\"phi\" data-point=\"0\"", "y2");
    // Cross-check against the ridge marker and flat ceiling drawn for ceiling 0.
    EXPECT_NEAR(x2, attr(svg, "<line class=\"ridge-marker\" data-ceiling=\"0\"", "x1"), 1e-3);
    EXPECT_NEAR(y2, attr(svg, "<line class=\"compute-ceiling\" data-ceiling=\"0\"", "y1"), 1e-3);
    // And against the log-log mapping declared on the root element.
    const double lx0 = attr(svg, "<svg", "data-log-x-min"), lx1 = attr(svg, "<svg", "data-log-x-max");
    const ChartLayout L = chart_layout(c);
    const double ridge_oi = 4610.0 / 120.03;
    const double want_x =
        L.margin_left + (std::log10(ridge_oi) - lx0) / (lx1 - lx0) * (L.width - L.margin_left - L.margin_right);
    EXPECT_NEAR(x2, want_x, 1e-3);
    // Compute-bound segment is vertical.
    EXPECT_NEAR(attr(svg, "<line class=\"phi\" data-point=\"1\"", "x1"),
                attr(svg, "<line class=\"phi\" data-point=\"1\"", "x2"), 1e-9);
}

TEST(Chart, PointsAboveEveryCeilingAreFlagged) {
    ChartSpec c = sample_chart();
    c.points[0].point.perf_gflops = 150.0;  // above 120 GB/s * 1, below 204.8 * 1
    EXPECT_EQ(render_chart(c).find("above-ceiling"), std::string::npos);
    c.points[0].point.perf_gflops = 250.0;
    EXPECT_NE(render_chart(c).find("above-ceiling"), std::string::npos);
}

TEST(Chart, EdgeCases) {
    ChartSpec c = sample_chart();
    c.points.clear();
    const std::string empty = render_chart(c);
    EXPECT_NE(empty.find("bandwidth-ceiling"), std::string::npos);
    EXPECT_EQ(empty.find("<circle"), std::string::npos);

    c = sample_chart();
    c.points[1].point.oi = 0.0;
    try {
        (void)render_chart(c);
        FAIL();
    } catch (const RenderError& e) {
        EXPECT_NE(std::string(e.what()).find("prefill"), std::string::npos);
    }
    c = sample_chart();
    c.ceilings.clear();
    EXPECT_THROW(render_chart(c), RenderError);
}

TEST(Csv, Shapes) {
    const std::vector<RooflinePoint> none;
    const std::vector<PhiResult> no_phi;
    EXPECT_EQ(lines(export_csv(none, no_phi, no_phi)), std::vector<std::string>{std::string(kPointsCsvHeader)});

    RooflinePoint p;
    p.oi = 1.0 / 3.0;
    p.perf_gflops = 123.456789012;
    p.label = "a, \"quoted\"";
    p.scenario = "SISO";
    RidgePoint r;
    r.peak_gflops = 4610;
    r.bandwidth_gbps = 120.03;
    r.oi = r.peak_gflops / r.bandwidth_gbps;
    const std::vector<RooflinePoint> one{classified(p, r)};
    const std::vector<PhiResult> raw{phi(p, r, PhiSpace::Raw)}, lg{phi(p, r, PhiSpace::Log10)};
    const auto rows = lines(export_csv(one, raw, lg));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].rfind("\"a, \"\"quoted\"\"\",SISO,", 0), 0u) << rows[1];

    // Numbers survive a text round trip to six significant digits.
    std::vector<std::string> cells;
    std::string rest = rows[1].substr(rows[1].find("SISO,") + 5);
    std::stringstream ss(rest);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    ASSERT_GE(cells.size(), 5u);
    EXPECT_NEAR(std::stod(cells[0]), p.oi, 1e-6 * p.oi);
    EXPECT_NEAR(std::stod(cells[1]), p.perf_gflops, 1e-6 * p.perf_gflops);
    EXPECT_EQ(cells[2], "MemoryBound");
    EXPECT_NEAR(std::stod(cells[3]), raw[0].value, 1e-6 * raw[0].value);

    EXPECT_THROW(export_csv(one, no_phi, lg), ConfigError);
    const auto phi_rows = lines(export_phi_csv(one, raw, lg));
    ASSERT_EQ(phi_rows.size(), 2u);
    EXPECT_EQ(phi_rows[0].rfind("label,regime,basis", 0), 0u);
}

TEST(Csv, SortedByLabel) {
    std::vector<RooflinePoint> pts(3);
    pts[0].label = "c";
    pts[1].label = "a";
    pts[2].label = "b";
    for (auto& p : pts) p.oi = p.perf_gflops = 1.0;
    RidgePoint r{10.0, 100.0, 10.0};
    std::vector<PhiResult> raw, lg;
    for (const auto& p : pts) {
        raw.push_back(phi(p, r, PhiSpace::Raw));
        lg.push_back(phi(p, r, PhiSpace::Log10));
    }
    const auto rows = lines(export_csv(pts, raw, lg));
    EXPECT_EQ(rows[1][0], 'a');
    EXPECT_EQ(rows[2][0], 'b');
    EXPECT_EQ(rows[3][0], 'c');
}
