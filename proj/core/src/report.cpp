#include "rooflinebench/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "json_util.hpp"
#include "text_util.hpp"

namespace rooflinebench {

using detail::json;
using detail::ordered_json;

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Layers: return "layers";
        case SweepAxis::Precision: return "precision";
        case SweepAxis::Scenario: return "scenario";
        case SweepAxis::ContextLength: return "context_length";
    }
    return "?";
}

SweepAxis parse_sweep_axis(std::string_view text) {
    const std::string l = detail::lower(detail::trim(text));
    if (l == "layers") return SweepAxis::Layers;
    if (l == "precision") return SweepAxis::Precision;
    if (l == "scenario") return SweepAxis::Scenario;
    if (l == "context_length" || l == "context") return SweepAxis::ContextLength;
    throw ConfigError(fmt::format(
        "axis: unknown value '{}' (expected layers, precision, scenario or context_length)", text));
}

namespace {

std::int64_t parse_int(std::string_view s, std::string_view what) {
    s = detail::trim(s);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw ConfigError(fmt::format("{}: '{}' is not an integer", what, s));
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = s.find(sep, pos);
        out.push_back(detail::trim(s.substr(pos, next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

std::string value_label(SweepAxis axis, const SweepValue& v) {
    switch (axis) {
        case SweepAxis::Layers: return fmt::format("L={}", std::get<std::int64_t>(v));
        case SweepAxis::ContextLength: return fmt::format("N={}", std::get<std::int64_t>(v));
        case SweepAxis::Precision: {
            const auto& p = std::get<Precision>(v);
            if (p.kind == PrecisionKind::Custom) return fmt::format("custom:{}", p.bytes_per_weight);
            return std::string(to_string(p.kind));
        }
        case SweepAxis::Scenario: {
            const auto& s = std::get<ScenarioShape>(v);
            return fmt::format("p{}/g{}", s.n_prompt, s.n_gen);
        }
    }
    return "?";
}

}  // namespace

std::vector<SweepValue> parse_sweep_values(SweepAxis axis, std::string_view text) {
    std::vector<SweepValue> out;
    for (std::string_view item : split(text, ',')) {
        if (item.empty()) throw ConfigError("values: empty item");
        switch (axis) {
            case SweepAxis::Layers:
            case SweepAxis::ContextLength: {
                const std::size_t dots = item.find("..");
                if (dots == std::string_view::npos) {
                    out.emplace_back(parse_int(item, "values"));
                    break;
                }
                const std::string_view lo_s = item.substr(0, dots);
                std::string_view hi_s = item.substr(dots + 2);
                std::int64_t factor = 0;
                if (auto star = hi_s.find('*'); star != std::string_view::npos) {
                    factor = parse_int(hi_s.substr(star + 1), "values");
                    hi_s = hi_s.substr(0, star);
                    if (factor < 2) throw ConfigError("values: range factor must be at least 2");
                }
                const std::int64_t lo = parse_int(lo_s, "values");
                const std::int64_t hi = parse_int(hi_s, "values");
                if (lo < 1 || hi < lo) {
                    throw ConfigError(fmt::format("values: invalid range '{}'", item));
                }
                for (std::int64_t v = lo; v <= hi; v = factor ? v * factor : v + 1) out.emplace_back(v);
                break;
            }
            case SweepAxis::Precision: out.emplace_back(parse_precision(item)); break;
            case SweepAxis::Scenario: {
                const auto parts = split(item, ':');
                if (parts.size() != 2) {
                    throw ConfigError(fmt::format("values: scenario '{}' must be n_prompt:n_gen", item));
                }
                out.emplace_back(ScenarioShape{parse_int(parts[0], "values"), parse_int(parts[1], "values")});
                break;
            }
        }
    }
    return out;
}

std::vector<RooflinePoint> run_sweep(const SweepSpec& spec) {
    if (spec.values.empty()) throw ConfigError("sweep: values must not be empty");
    const RidgePoint r = ridge(spec.profile, spec.ceiling, spec.basis);

    std::vector<RooflinePoint> points;
    points.reserve(spec.values.size());
    for (const SweepValue& value : spec.values) {
        const std::string label = value_label(spec.axis, value);
        try {
            CostBreakdown cost;
            std::string scenario;
            switch (spec.axis) {
                case SweepAxis::Layers: {
                    const auto layers = std::get<std::int64_t>(value);
                    if (layers < 1) throw ConfigError("layer count must be at least 1");
                    cost = decode_step_cost(scale_layers(spec.arch, layers), spec.context,
                                            spec.weights, spec.kv, spec.cost);
                    break;
                }
                case SweepAxis::Precision:
                    cost = decode_step_cost(spec.arch, spec.context, std::get<Precision>(value),
                                            spec.kv, spec.cost);
                    break;
                case SweepAxis::ContextLength: {
                    const auto n = std::get<std::int64_t>(value);
                    if (n < 1) throw ConfigError("context length must be at least 1");
                    cost = decode_step_cost(spec.arch, n, spec.weights, spec.kv, spec.cost);
                    break;
                }
                case SweepAxis::Scenario: {
                    const auto& s = std::get<ScenarioShape>(value);
                    if (s.n_prompt < 0 || s.n_gen < 0) {
                        throw ConfigError("scenario token counts must be non-negative");
                    }
                    cost = representative_decode_cost(spec.arch, s.n_prompt, s.n_gen, spec.weights,
                                                      spec.kv, spec.cost, spec.scenario_context);
                    scenario = std::string(
                        to_string(classify_scenario(s.n_prompt, s.n_gen, spec.thresholds)));
                    break;
                }
            }
            const double oi = cost.total_flops() / cost.total_bytes();
            const double perf = attainable(r, oi);
            const double latency = cost.total_flops() / (perf * 1e9);
            RooflinePoint p = to_point(cost, latency, label, Provenance::Predicted);
            p.perf_gflops = perf;
            p.scenario = scenario;
            points.push_back(classified(std::move(p), r));
        } catch (const Error& e) {
            throw ConfigError(fmt::format("sweep value {}: {}", label, e.what()));
        }
    }
    return points;
}

GapReport gap_analysis(const HardwareProfile& profile) {
    GapReport report;
    report.device = profile.name;
    const auto& bw = profile.bandwidth_gbps;
    if (bw.theoretical && bw.measured) report.bandwidth_gap_gbps = *bw.theoretical - *bw.measured;
    for (const auto& [kind, pair] : profile.peak_gflops) {
        ComputeGap gap;
        if (pair.theoretical && pair.measured) gap.gap_gflops = *pair.theoretical - *pair.measured;
        if (pair.theoretical && bw.theoretical) gap.ridge_theoretical = ridge(profile, kind, Basis::Theoretical);
        if (pair.measured && bw.measured) gap.ridge_measured = ridge(profile, kind, Basis::Measured);
        report.compute[kind] = gap;
    }
    return report;
}

namespace {

ordered_json ridge_json(const std::optional<RidgePoint>& r) {
    if (!r) return nullptr;
    ordered_json j;
    j["oi_flops_per_byte"] = r->oi;
    j["peak_gflops"] = r->peak_gflops;
    j["bandwidth_gbps"] = r->bandwidth_gbps;
    return j;
}

template <class T>
ordered_json opt_json(const std::optional<T>& v) {
    if (!v) return nullptr;
    return *v;
}

}  // namespace

std::string gaps_to_json(const GapReport& report) {
    ordered_json j;
    j["device"] = report.device;
    j["bandwidth_gap_gbps"] = opt_json(report.bandwidth_gap_gbps);
    ordered_json compute = ordered_json::object();
    for (const auto& [kind, gap] : report.compute) {
        ordered_json g;
        g["gap_gflops"] = opt_json(gap.gap_gflops);
        g["ridge_theoretical"] = ridge_json(gap.ridge_theoretical);
        g["ridge_measured"] = ridge_json(gap.ridge_measured);
        if (gap.ridge_theoretical && gap.ridge_measured) {
            g["ridge_shift"] = gap.ridge_measured->oi - gap.ridge_theoretical->oi;
        } else {
            g["ridge_shift"] = nullptr;
        }
        compute[std::string(to_string(kind))] = std::move(g);
    }
    j["compute"] = std::move(compute);
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Chart

RidgePoint Ceiling::ridge() const {
    RidgePoint r;
    r.peak_gflops = peak_gflops;
    r.bandwidth_gbps = bandwidth_gbps;
    r.oi = peak_gflops / bandwidth_gbps;
    r.basis = basis;
    return r;
}

ChartSpec chart_spec_from_json(std::string_view json_text) {
    const json doc = detail::parse_json(json_text, "chart");
    detail::require_object(doc, "chart");
    detail::reject_unknown_keys(doc, {"title", "ceilings", "points", "phi_annotations"}, "chart");
    ChartSpec spec;
    spec.title = detail::opt_string(doc, "title", "chart").value_or("");
    spec.phi_annotations = detail::opt_bool(doc, "phi_annotations", "chart").value_or(false);
    if (auto c = doc.find("ceilings"); c != doc.end()) {
        if (!c->is_array()) throw SchemaError("chart.ceilings: expected array");
        for (std::size_t i = 0; i < c->size(); ++i) {
            const std::string w = fmt::format("chart.ceilings[{}]", i);
            const json& e = (*c)[i];
            detail::require_object(e, w);
            detail::reject_unknown_keys(e, {"label", "basis", "bandwidth_gbps", "peak_gflops"}, w);
            Ceiling ceil;
            ceil.label = detail::opt_string(e, "label", w).value_or("");
            ceil.basis = parse_basis(detail::opt_string(e, "basis", w).value_or("theoretical"));
            ceil.bandwidth_gbps = detail::required(detail::opt_number(e, "bandwidth_gbps", w),
                                                   "bandwidth_gbps", w, "number");
            ceil.peak_gflops = detail::required(detail::opt_number(e, "peak_gflops", w),
                                                "peak_gflops", w, "number");
            if (!(ceil.bandwidth_gbps > 0) || !(ceil.peak_gflops > 0)) {
                throw SchemaError(w + ": bandwidth_gbps and peak_gflops must be positive");
            }
            spec.ceilings.push_back(std::move(ceil));
        }
    }
    if (auto p = doc.find("points"); p != doc.end()) {
        if (!p->is_array()) throw SchemaError("chart.points: expected array");
        for (std::size_t i = 0; i < p->size(); ++i) {
            const std::string w = fmt::format("chart.points[{}]", i);
            const json& e = (*p)[i];
            detail::require_object(e, w);
            detail::reject_unknown_keys(
                e, {"label", "scenario", "oi", "perf_gflops", "provenance", "ceiling"}, w);
            ChartPoint cp;
            cp.point.label = detail::opt_string(e, "label", w).value_or("");
            cp.point.scenario = detail::opt_string(e, "scenario", w).value_or("");
            cp.point.oi = detail::required(detail::opt_number(e, "oi", w), "oi", w, "number");
            cp.point.perf_gflops =
                detail::required(detail::opt_number(e, "perf_gflops", w), "perf_gflops", w, "number");
            const std::string prov = detail::opt_string(e, "provenance", w).value_or("measured");
            if (prov == "measured") {
                cp.point.provenance = Provenance::Measured;
            } else if (prov == "predicted") {
                cp.point.provenance = Provenance::Predicted;
            } else {
                throw SchemaError(w + ".provenance: expected 'measured' or 'predicted'");
            }
            cp.ceiling = static_cast<std::size_t>(detail::opt_integer(e, "ceiling", w).value_or(0));
            spec.points.push_back(std::move(cp));
        }
    }
    return spec;
}

std::string chart_spec_to_json(const ChartSpec& spec) {
    ordered_json j;
    j["title"] = spec.title;
    ordered_json ceilings = ordered_json::array();
    for (const auto& c : spec.ceilings) {
        ceilings.push_back({{"label", c.label},
                            {"basis", std::string(to_string(c.basis))},
                            {"bandwidth_gbps", c.bandwidth_gbps},
                            {"peak_gflops", c.peak_gflops}});
    }
    j["ceilings"] = std::move(ceilings);
    ordered_json points = ordered_json::array();
    for (const auto& cp : spec.points) {
        ordered_json p;
        p["label"] = cp.point.label;
        p["scenario"] = cp.point.scenario;
        p["oi"] = cp.point.oi;
        p["perf_gflops"] = cp.point.perf_gflops;
        p["provenance"] = std::string(to_string(cp.point.provenance));
        p["ceiling"] = cp.ceiling;
        points.push_back(std::move(p));
    }
    j["points"] = std::move(points);
    j["phi_annotations"] = spec.phi_annotations;
    return j.dump(2) + "\n";
}

double ChartLayout::x(double oi) const {
    const double plot_w = width - margin_left - margin_right;
    return margin_left + (std::log10(oi) - log_x_min) / (log_x_max - log_x_min) * plot_w;
}

double ChartLayout::y(double perf) const {
    const double plot_h = height - margin_top - margin_bottom;
    return height - margin_bottom - (std::log10(perf) - log_y_min) / (log_y_max - log_y_min) * plot_h;
}

namespace {

void check_point(const RooflinePoint& p) {
    if (!(p.oi > 0.0) || !(p.perf_gflops > 0.0) || !std::isfinite(p.oi) ||
        !std::isfinite(p.perf_gflops)) {
        throw RenderError(fmt::format("point '{}' has a non-positive coordinate (oi={}, perf={})",
                                      p.label, p.oi, p.perf_gflops));
    }
}

}  // namespace

ChartLayout chart_layout(const ChartSpec& spec) {
    if (spec.ceilings.empty()) throw RenderError("chart needs at least one ceiling");
    double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
    auto include = [&](double x, double y) {
        x_lo = std::min(x_lo, x);
        x_hi = std::max(x_hi, x);
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
    };
    for (const auto& c : spec.ceilings) {
        const RidgePoint r = c.ridge();
        include(r.oi, r.peak_gflops);
    }
    for (const auto& cp : spec.points) {
        check_point(cp.point);
        include(cp.point.oi, cp.point.perf_gflops);
    }
    ChartLayout layout;
    layout.log_x_min = std::floor(std::log10(x_lo)) - 1.0;
    layout.log_x_max = std::ceil(std::log10(x_hi)) + 1.0;
    layout.log_y_min = std::floor(std::log10(y_lo)) - 1.0;
    layout.log_y_max = std::ceil(std::log10(y_hi)) + 1.0;
    return layout;
}

namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string_view scenario_color(std::string_view scenario) {
    if (scenario == "SISO") return "#1f77b4";
    if (scenario == "SILO") return "#ff7f0e";
    if (scenario == "LISO") return "#2ca02c";
    if (scenario == "LILO") return "#d62728";
    return "#7f7f7f";
}

constexpr std::string_view kCeilingColors[] = {"#3b4cc0", "#b40426", "#4d9221", "#8e44ad",
                                               "#e08214", "#1b7837"};

std::string decade_label(int exponent) {
    if (exponent >= 0 && exponent <= 6) return fmt::format("{}", static_cast<long long>(std::pow(10.0, exponent)));
    if (exponent < 0 && exponent >= -3) return fmt::format("{:.{}f}", std::pow(10.0, exponent), -exponent);
    return fmt::format("1e{}", exponent);
}

}  // namespace

std::string render_chart(const ChartSpec& spec) {
    const ChartLayout L = chart_layout(spec);
    const double x0 = L.margin_left, x1 = L.width - L.margin_right;
    const double y0 = L.margin_top, y1 = L.height - L.margin_bottom;
    const double oi_min = std::pow(10.0, L.log_x_min), oi_max = std::pow(10.0, L.log_x_max);
    const double perf_min = std::pow(10.0, L.log_y_min);

    std::string s;
    auto out = [&s]<class... A>(fmt::format_string<A...> f, A&&... args) {
        fmt::format_to(std::back_inserter(s), f, std::forward<A>(args)...);
    };

    out("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
        "viewBox=\"0 0 {:.0f} {:.0f}\" data-log-x-min=\"{:.0f}\" data-log-x-max=\"{:.0f}\" "
        "data-log-y-min=\"{:.0f}\" data-log-y-max=\"{:.0f}\" data-plot=\"{:.3f} {:.3f} {:.3f} {:.3f}\">\n",
        L.width, L.height, L.width, L.height, L.log_x_min, L.log_x_max, L.log_y_min, L.log_y_max,
        x0, y0, x1, y1);
    out("<title>{}</title>\n", xml_escape(spec.title.empty() ? "Roofline" : spec.title));
    out("<defs><clipPath id=\"plot-area\"><rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" "
        "height=\"{:.3f}\"/></clipPath></defs>\n",
        x0, y0, x1 - x0, y1 - y0);
    out("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"#ffffff\"/>\n", L.width, L.height);

    // Decade grid and tick labels.
    out("<g class=\"grid\" stroke=\"#e0e0e0\" stroke-width=\"1\" font-family=\"sans-serif\" "
        "font-size=\"12\" fill=\"#333333\">\n");
    for (int e = static_cast<int>(L.log_x_min); e <= static_cast<int>(L.log_x_max); ++e) {
        const double x = L.x(std::pow(10.0, e));
        out("<line x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\"/>\n", x, y0, x, y1);
        out("<text x=\"{:.3f}\" y=\"{:.3f}\" text-anchor=\"middle\" stroke=\"none\">{}</text>\n", x,
            y1 + 18, decade_label(e));
    }
    for (int e = static_cast<int>(L.log_y_min); e <= static_cast<int>(L.log_y_max); ++e) {
        const double y = L.y(std::pow(10.0, e));
        out("<line x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\"/>\n", x0, y, x1, y);
        out("<text x=\"{:.3f}\" y=\"{:.3f}\" text-anchor=\"end\" stroke=\"none\">{}</text>\n", x0 - 8,
            y + 4, decade_label(e));
    }
    out("</g>\n");
    out("<rect class=\"frame\" x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" "
        "fill=\"none\" stroke=\"#333333\"/>\n",
        x0, y0, x1 - x0, y1 - y0);
    out("<text x=\"{:.3f}\" y=\"{:.3f}\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"14\">Operational intensity (FLOPs/Byte)</text>\n",
        (x0 + x1) / 2, L.height - 20);
    out("<text x=\"20\" y=\"{:.3f}\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"14\" transform=\"rotate(-90 20 {:.3f})\">Performance (GFLOPS)</text>\n",
        (y0 + y1) / 2, (y0 + y1) / 2);

    // Ceilings: sloped bandwidth roof up to the ridge, flat compute roof after it.
    out("<g class=\"ceilings\" clip-path=\"url(#plot-area)\" fill=\"none\" stroke-width=\"2\">\n");
    for (std::size_t i = 0; i < spec.ceilings.size(); ++i) {
        const Ceiling& c = spec.ceilings[i];
        const RidgePoint r = c.ridge();
        const auto color = kCeilingColors[i % std::size(kCeilingColors)];
        const char* dash = c.basis == Basis::Measured ? " stroke-dasharray=\"8,4\"" : "";
        const double start_oi = std::max(oi_min, perf_min / c.bandwidth_gbps);
        out("<line class=\"bandwidth-ceiling\" data-ceiling=\"{}\" x1=\"{:.3f}\" y1=\"{:.3f}\" "
            "x2=\"{:.3f}\" y2=\"{:.3f}\" stroke=\"{}\"{}/>\n",
            i, L.x(start_oi), L.y(start_oi * c.bandwidth_gbps), L.x(r.oi), L.y(r.peak_gflops), color, dash);
        out("<line class=\"compute-ceiling\" data-ceiling=\"{}\" x1=\"{:.3f}\" y1=\"{:.3f}\" "
            "x2=\"{:.3f}\" y2=\"{:.3f}\" stroke=\"{}\"{}/>\n",
            i, L.x(r.oi), L.y(r.peak_gflops), L.x(oi_max), L.y(r.peak_gflops), color, dash);
        out("<line class=\"ridge-marker\" data-ceiling=\"{}\" x1=\"{:.3f}\" y1=\"{:.3f}\" "
            "x2=\"{:.3f}\" y2=\"{:.3f}\" stroke=\"{}\" stroke-width=\"1\" stroke-dasharray=\"3,3\"/>\n",
            i, L.x(r.oi), y0, L.x(r.oi), y1, color);
    }
    out("</g>\n");

    if (spec.phi_annotations) {
        out("<g class=\"phi-segments\" stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"2,2\">\n");
        for (std::size_t i = 0; i < spec.points.size(); ++i) {
            const ChartPoint& cp = spec.points[i];
            if (cp.ceiling >= spec.ceilings.size()) {
                throw RenderError(fmt::format("point '{}' references missing ceiling {}",
                                              cp.point.label, cp.ceiling));
            }
            const RidgePoint r = spec.ceilings[cp.ceiling].ridge();
            const bool memory = classify(cp.point.oi, r) == Regime::MemoryBound;
            const double tx = memory ? r.oi : cp.point.oi;
            const double ty = r.peak_gflops;
            out("<line class=\"phi\" data-point=\"{}\" data-regime=\"{}\" x1=\"{:.3f}\" y1=\"{:.3f}\" "
                "x2=\"{:.3f}\" y2=\"{:.3f}\"/>\n",
                i, to_string(memory ? Regime::MemoryBound : Regime::ComputeBound),
                L.x(cp.point.oi), L.y(cp.point.perf_gflops), L.x(tx), L.y(ty));
        }
        out("</g>\n");
    }

    out("<g class=\"points\" font-family=\"sans-serif\" font-size=\"10\">\n");
    for (std::size_t i = 0; i < spec.points.size(); ++i) {
        const RooflinePoint& p = spec.points[i].point;
        bool under = false;
        for (const auto& c : spec.ceilings) {
            under = under || p.perf_gflops <= attainable(c.ridge(), p.oi) * (1.0 + 1e-9);
        }
        const double cx = L.x(p.oi), cy = L.y(p.perf_gflops);
        const char* shape_class = p.provenance == Provenance::Predicted ? "predicted" : "measured";
        out("<circle class=\"point {}{}\" data-point=\"{}\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"5\" "
            "fill=\"{}\" stroke=\"#000000\"><title>{}</title></circle>\n",
            shape_class, under ? "" : " above-ceiling", i, cx, cy, scenario_color(p.scenario),
            xml_escape(p.label));
        out("<text x=\"{:.3f}\" y=\"{:.3f}\">{}</text>\n", cx + 7, cy - 7, xml_escape(p.label));
    }
    out("</g>\n");

    // Legend.
    out("<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n");
    double ly = y0 + 16;
    for (std::size_t i = 0; i < spec.ceilings.size(); ++i) {
        const Ceiling& c = spec.ceilings[i];
        const auto color = kCeilingColors[i % std::size(kCeilingColors)];
        out("<line x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\" stroke=\"{}\" "
            "stroke-width=\"2\"{}/>\n",
            x1 - 230, ly - 4, x1 - 205, ly - 4, color,
            c.basis == Basis::Measured ? " stroke-dasharray=\"8,4\"" : "");
        out("<text x=\"{:.3f}\" y=\"{:.3f}\">{} (ridge {:.2f})</text>\n", x1 - 200, ly,
            xml_escape(c.label.empty() ? std::string(to_string(c.basis)) : c.label), c.ridge().oi);
        ly += 16;
    }
    out("</g>\n");
    out("</svg>\n");
    return s;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::vector<std::size_t> label_order(std::span<const RooflinePoint> points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[a].label < points[b].label; });
    return order;
}

void check_aligned(std::size_t points, std::size_t raw, std::size_t log) {
    if (points != raw || points != log) {
        throw ConfigError(fmt::format(
            "csv export: {} points but {} raw and {} log10 Phi values", points, raw, log));
    }
}

}  // namespace

std::string export_csv(std::span<const RooflinePoint> points, std::span<const PhiResult> phi_raw,
                       std::span<const PhiResult> phi_log10) {
    check_aligned(points.size(), phi_raw.size(), phi_log10.size());
    std::string s(kPointsCsvHeader);
    s += '\n';
    for (std::size_t i : label_order(points)) {
        const RooflinePoint& p = points[i];
        fmt::format_to(std::back_inserter(s), "{},{},{:.9g},{:.9g},{},{:.9g},{:.9g},{}\n",
                       csv_field(p.label), csv_field(p.scenario), p.oi, p.perf_gflops,
                       to_string(phi_raw[i].regime), phi_raw[i].value, phi_log10[i].value,
                       to_string(p.provenance));
    }
    return s;
}

std::string export_phi_csv(std::span<const RooflinePoint> points, std::span<const PhiResult> phi_raw,
                           std::span<const PhiResult> phi_log10) {
    check_aligned(points.size(), phi_raw.size(), phi_log10.size());
    std::string s =
        "label,regime,basis,precision,ridge_oi,ridge_peak_gflops,phi_raw,phi_log10,above_ceiling\n";
    for (std::size_t i : label_order(points)) {
        const PhiResult& r = phi_raw[i];
        fmt::format_to(std::back_inserter(s), "{},{},{},{},{:.9g},{:.9g},{:.9g},{:.9g},{}\n",
                       csv_field(points[i].label), to_string(r.regime), to_string(r.ridge.basis),
                       to_string(r.ridge.precision), r.ridge.oi, r.ridge.peak_gflops, r.value,
                       phi_log10[i].value, r.above_ceiling ? "true" : "false");
    }
    return s;
}

}  // namespace rooflinebench
