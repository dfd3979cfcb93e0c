#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rooflinebench/arch.hpp"
#include "rooflinebench/ingest.hpp"
#include "rooflinebench/roofline.hpp"

namespace rooflinebench {

enum class SweepAxis { Layers, Precision, Scenario, ContextLength };
std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view text);

struct ScenarioShape {
    std::int64_t n_prompt = 0;
    std::int64_t n_gen = 0;
};

using SweepValue = std::variant<std::int64_t, Precision, ScenarioShape>;

struct SweepSpec {
    SweepAxis axis = SweepAxis::Layers;
    std::vector<SweepValue> values;
    ArchConfig arch;
    HardwareProfile profile;
    Basis basis = Basis::Theoretical;
    ComputeKind ceiling = ComputeKind::FP16;
    CostOptions cost;
    Precision weights = Precision::fp16();
    Precision kv = Precision::fp16();
    std::int64_t context = 1;  // decode context for non-context axes
    DecodeContext scenario_context = DecodeContext::Mid;
    ScenarioThresholds thresholds;
};

// Parses the CLI value syntax for an axis: comma lists ("2,4,8"),
// inclusive ranges ("2..8"), doubling ranges ("2..64*2"), precision names
// ("fp16,q8_0") and scenario shapes ("64:64,2048:64").
std::vector<SweepValue> parse_sweep_values(SweepAxis axis, std::string_view text);

// One predicted point per value, placed on the ceiling: perf =
// attainable(OI). Configuration errors are rethrown with the offending
// value in the message.
std::vector<RooflinePoint> run_sweep(const SweepSpec& spec);

struct ComputeGap {
    std::optional<double> gap_gflops;  // theoretical - measured, signed
    std::optional<RidgePoint> ridge_theoretical;
    std::optional<RidgePoint> ridge_measured;
};

struct GapReport {
    std::string device;
    std::optional<double> bandwidth_gap_gbps;
    std::map<ComputeKind, ComputeGap> compute;
};

GapReport gap_analysis(const HardwareProfile& profile);
std::string gaps_to_json(const GapReport& report);

struct Ceiling {
    std::string label;
    double bandwidth_gbps = 0.0;
    double peak_gflops = 0.0;
    Basis basis = Basis::Theoretical;

    RidgePoint ridge() const;
};

struct ChartPoint {
    RooflinePoint point;
    std::size_t ceiling = 0;  // index of the ceiling used for Phi
};

struct ChartSpec {
    std::string title;
    std::vector<Ceiling> ceilings;
    std::vector<ChartPoint> points;
    bool phi_annotations = false;
};

ChartSpec chart_spec_from_json(std::string_view json_text);
std::string chart_spec_to_json(const ChartSpec& spec);

// Canvas geometry shared by the renderer and its tests.
struct ChartLayout {
    double width = 900.0;
    double height = 600.0;
    double margin_left = 90.0;
    double margin_right = 40.0;
    double margin_top = 50.0;
    double margin_bottom = 70.0;
    double log_x_min = 0.0, log_x_max = 1.0;
    double log_y_min = 0.0, log_y_max = 1.0;

    double x(double oi) const;
    double y(double perf) const;
};

// Axes span whole decades covering every ridge and point, padded by one
// decade on each side.
ChartLayout chart_layout(const ChartSpec& spec);

// Deterministic SVG: log-log axes, sloped bandwidth and flat compute
// ceilings, dashed ridge markers, points colored by scenario, optional Phi
// segments. Throws RenderError for a spec without ceilings or a point with
// a non-positive coordinate.
std::string render_chart(const ChartSpec& spec);

inline constexpr std::string_view kPointsCsvHeader =
    "label,scenario,oi_flops_per_byte,perf_gflops,regime,phi_raw,phi_log10,provenance";

// One row per point, sorted by label (stable). Throws ConfigError when the
// three lists differ in length.
std::string export_csv(std::span<const RooflinePoint> points, std::span<const PhiResult> phi_raw,
                       std::span<const PhiResult> phi_log10);

// Per-point Phi detail including the ridge each value was measured against.
std::string export_phi_csv(std::span<const RooflinePoint> points,
                           std::span<const PhiResult> phi_raw,
                           std::span<const PhiResult> phi_log10);

}  // namespace rooflinebench
