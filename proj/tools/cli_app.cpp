#include "cli_app.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "rooflinebench/arch_io.hpp"
#include "rooflinebench/error.hpp"
#include "rooflinebench/hwprobe.hpp"
#include "rooflinebench/ingest.hpp"
#include "rooflinebench/profile_io.hpp"
#include "rooflinebench/report.hpp"

namespace rooflinebench::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// ToolConfig

namespace {

bool parse_switch(std::string_view key, std::string_view text) {
    std::string v(text);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw ConfigError(fmt::format("{}: expected on/off, got '{}'", key, text));
}

std::int64_t parse_boundary(std::string_view key, std::int64_t v) {
    if (v < 1) throw ConfigError(fmt::format("{}: must be a positive token count, got {}", key, v));
    return v;
}

}  // namespace

ToolConfig parse_tool_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("config: invalid JSON: {}", e.what()));
    }
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object");

    ToolConfig c;
    for (const auto& [key, value] : doc.items()) {
        auto text = [&]() -> std::string {
            if (!value.is_string()) throw ConfigError(fmt::format("config.{}: expected string", key));
            return value.get<std::string>();
        };
        auto flag = [&]() -> bool {
            if (!value.is_boolean()) throw ConfigError(fmt::format("config.{}: expected boolean", key));
            return value.get<bool>();
        };
        try {
            if (key == "convention") {
                c.convention = parse_convention(text());
            } else if (key == "phi_space") {
                c.phi_space = parse_phi_space(text());
            } else if (key == "cost_mode") {
                c.cost_mode = parse_cost_mode(text());
            } else if (key == "scenario_boundary") {
                if (!value.is_number_integer()) {
                    throw ConfigError("config.scenario_boundary: expected integer");
                }
                c.scenario_boundary = parse_boundary("config.scenario_boundary", value.get<std::int64_t>());
            } else if (key == "kv_write_traffic") {
                c.kv_write_traffic = flag();
            } else if (key == "include_lm_head") {
                c.include_lm_head = flag();
            } else {
                throw ConfigError(fmt::format(
                    "config: unknown key '{}' (expected convention, phi_space, scenario_boundary, "
                    "cost_mode, kv_write_traffic or include_lm_head)",
                    key));
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(fmt::format("config.{}: {}", key, e.what()));
        }
    }
    return c;
}

std::string tool_config_to_json(const ToolConfig& c) {
    ordered_json j;
    j["convention"] = std::string(to_string(c.convention));
    j["phi_space"] = std::string(to_string(c.phi_space));
    j["scenario_boundary"] = c.scenario_boundary;
    j["cost_mode"] = std::string(to_string(c.cost_mode));
    j["kv_write_traffic"] = c.kv_write_traffic;
    j["include_lm_head"] = c.include_lm_head;
    return j.dump(2) + "\n";
}

void apply_environment(ToolConfig& c, const EnvLookup& env) {
    auto wrap = [](const char* name, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            throw ConfigError(fmt::format("{}: {}", name, e.what()));
        }
    };
    if (auto v = env("ROOFLINEBENCH_CONVENTION")) {
        wrap("ROOFLINEBENCH_CONVENTION", [&] { c.convention = parse_convention(*v); });
    }
    if (auto v = env("ROOFLINEBENCH_PHI_SPACE")) {
        wrap("ROOFLINEBENCH_PHI_SPACE", [&] { c.phi_space = parse_phi_space(*v); });
    }
    if (auto v = env("ROOFLINEBENCH_COST_MODE")) {
        wrap("ROOFLINEBENCH_COST_MODE", [&] { c.cost_mode = parse_cost_mode(*v); });
    }
    if (auto v = env("ROOFLINEBENCH_SCENARIO_BOUNDARY")) {
        std::int64_t n = 0;
        try {
            std::size_t used = 0;
            n = std::stoll(*v, &used);
            if (used != v->size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("ROOFLINEBENCH_SCENARIO_BOUNDARY: '{}' is not an integer", *v));
        }
        c.scenario_boundary = parse_boundary("ROOFLINEBENCH_SCENARIO_BOUNDARY", n);
    }
    if (auto v = env("ROOFLINEBENCH_KV_WRITE_TRAFFIC")) {
        c.kv_write_traffic = parse_switch("ROOFLINEBENCH_KV_WRITE_TRAFFIC", *v);
    }
    if (auto v = env("ROOFLINEBENCH_INCLUDE_LM_HEAD")) {
        c.include_lm_head = parse_switch("ROOFLINEBENCH_INCLUDE_LM_HEAD", *v);
    }
}

CostOptions cost_options(const ToolConfig& c) {
    CostOptions o;
    o.convention = c.convention;
    o.mode = c.cost_mode;
    o.kv_write_traffic = c.kv_write_traffic;
    o.include_lm_head = c.include_lm_head;
    return o;
}

std::string data_dir() {
    if (const char* env = std::getenv("ROOFLINEBENCH_DATA_DIR"); env && *env) return env;
#ifdef ROOFLINEBENCH_DATA_DIR
    if (fs::exists(fs::path(ROOFLINEBENCH_DATA_DIR) / "hardware_catalog.json")) {
        return ROOFLINEBENCH_DATA_DIR;
    }
#endif
    std::error_code ec;
    const fs::path exe = fs::read_symlink("/proc/self/exe", ec);
    if (!ec) {
        const fs::path installed = exe.parent_path().parent_path() / "share" / "rooflinebench";
        if (fs::exists(installed / "hardware_catalog.json")) return installed.string();
    }
    throw ConfigError(
        "bundled data not found; set ROOFLINEBENCH_DATA_DIR to the directory holding "
        "hardware_catalog.json");
}

// ---------------------------------------------------------------------------
// Subcommands

namespace {

struct Globals {
    std::string config_path;
    std::optional<std::string> convention, phi_space, cost_mode, kv_write, lm_head;
    std::optional<std::int64_t> boundary;
};

ToolConfig resolve_config(const Globals& g, const EnvLookup& env) {
    ToolConfig c;
    if (!g.config_path.empty()) c = parse_tool_config(read_text_file(g.config_path));
    apply_environment(c, env);
    if (g.convention) c.convention = parse_convention(*g.convention);
    if (g.phi_space) c.phi_space = parse_phi_space(*g.phi_space);
    if (g.cost_mode) c.cost_mode = parse_cost_mode(*g.cost_mode);
    if (g.boundary) c.scenario_boundary = parse_boundary("--scenario-boundary", *g.boundary);
    if (g.kv_write) c.kv_write_traffic = parse_switch("--kv-write-traffic", *g.kv_write);
    if (g.lm_head) c.include_lm_head = parse_switch("--lm-head", *g.lm_head);
    return c;
}

// Device selection shared by analyze, sweep, predict and compare.
struct DeviceArgs {
    std::string profile;  // empty: bundled hardware catalog
    std::string device;
    std::string basis;
    std::string ceiling;
};

void add_device_options(CLI::App* sub, DeviceArgs& d, std::string basis, std::string ceiling) {
    d.basis = std::move(basis);
    d.ceiling = std::move(ceiling);
    sub->add_option("--profile", d.profile, "Hardware profile JSON (default: bundled catalog)");
    sub->add_option("--device", d.device, "Profile name inside a multi-profile file");
    sub->add_option("--basis", d.basis, "theoretical|measured")->capture_default_str();
    sub->add_option("--ceiling", d.ceiling, "Compute ceiling: fp32|fp16|bf16|int8|fp64")
        ->capture_default_str();
}

HardwareProfile load_device(const DeviceArgs& d) {
    const fs::path path = d.profile.empty() ? fs::path(data_dir()) / "hardware_catalog.json"
                                            : fs::path(d.profile);
    return load_profile(path, d.device);
}

struct ArchArgs {
    std::string file;  // empty: bundled catalog
    std::string name;
};

void add_arch_options(CLI::App* sub, ArchArgs& a) {
    sub->add_option("--arch", a.file, "Architecture JSON (default: bundled catalog)");
    sub->add_option("--model", a.name, "Architecture name inside a multi-entry file");
}

ArchConfig load_model(const ArchArgs& a) {
    const fs::path path = a.file.empty() ? fs::path(data_dir()) / "arch_catalog.json" : fs::path(a.file);
    return load_arch(path, a.name);
}

struct Evaluated {
    std::vector<RooflinePoint> points;
    std::vector<PhiResult> raw;
    std::vector<PhiResult> log10;
};

Evaluated evaluate(std::vector<RooflinePoint> points, const RidgePoint& r) {
    Evaluated e;
    for (auto& p : points) {
        p = classified(std::move(p), r);
        e.raw.push_back(phi(p, r, PhiSpace::Raw));
        e.log10.push_back(phi(p, r, PhiSpace::Log10));
    }
    e.points = std::move(points);
    return e;
}

ChartSpec chart_for(const HardwareProfile& profile, ComputeKind kind, Basis chosen,
                    const std::vector<RooflinePoint>& points, std::string title) {
    ChartSpec spec;
    spec.title = std::move(title);
    spec.phi_annotations = true;
    std::size_t chosen_index = 0;
    for (Basis b : {Basis::Theoretical, Basis::Measured}) {
        RidgePoint r;
        try {
            r = ridge(profile, kind, b);
        } catch (const CapabilityError&) {
            continue;
        }
        if (b == chosen) chosen_index = spec.ceilings.size();
        spec.ceilings.push_back({fmt::format("{} {} {}", profile.name, to_string(kind), to_string(b)),
                                 r.bandwidth_gbps, r.peak_gflops, b});
    }
    for (const auto& p : points) spec.points.push_back({p, chosen_index});
    return spec;
}

void write_report(const fs::path& dir, const Evaluated& e, const HardwareProfile& profile,
                  ComputeKind kind, Basis basis, const std::string& title, std::ostream& out) {
    fs::create_directories(dir);
    write_text_file(dir / "points.csv", export_csv(e.points, e.raw, e.log10));
    write_text_file(dir / "phi.csv", export_phi_csv(e.points, e.raw, e.log10));
    write_text_file(dir / "gaps.json", gaps_to_json(gap_analysis(profile)));
    write_text_file(dir / "roofline.svg", render_chart(chart_for(profile, kind, basis, e.points, title)));
    out << fmt::format("wrote {}/{{points.csv,phi.csv,gaps.json,roofline.svg}}\n", dir.string());
}

void print_points(const Evaluated& e, PhiSpace space, std::ostream& out) {
    out << fmt::format("{:<36} {:>12} {:>12} {:<13} {:>10}\n", "point", "OI", "GFLOPS", "regime",
                       space == PhiSpace::Raw ? "phi" : "phi_log10");
    for (std::size_t i = 0; i < e.points.size(); ++i) {
        const auto& p = e.points[i];
        const auto& ph = space == PhiSpace::Raw ? e.raw[i] : e.log10[i];
        out << fmt::format("{:<36} {:>12.4f} {:>12.3f} {:<13} {:>10.4f}{}\n", p.label, p.oi,
                           p.perf_gflops, to_string(ph.regime), ph.value,
                           ph.above_ceiling ? "  above ceiling" : "");
    }
}

// Parses one or more llama-bench files. Row problems are warnings; a file
// with no usable record is an error.
std::vector<RunRecord> load_runs(const std::vector<std::string>& files, std::ostream& err) {
    std::vector<RunRecord> all;
    for (const auto& f : files) {
        ParseReport rep = parse_llama_bench(read_text_file(f));
        for (const auto& e : rep.errors) err << fmt::format("warning: {}: {}\n", f, e.message);
        if (rep.records.empty()) throw ConfigError(fmt::format("{}: no usable llama-bench rows", f));
        all.insert(all.end(), rep.records.begin(), rep.records.end());
    }
    return all;
}

struct JoinArgs {
    std::string kv_precision = "fp16";
    std::string context = "mid";
};

void add_join_options(CLI::App* sub, JoinArgs& j) {
    sub->add_option("--kv-precision", j.kv_precision, "KV cache precision")->capture_default_str();
    sub->add_option("--context", j.context, "Decode context position: start|mid|end|exact")
        ->capture_default_str();
}

JoinOptions join_options(const ToolConfig& c, const JoinArgs& j) {
    JoinOptions o;
    o.cost = cost_options(c);
    o.kv_precision = parse_precision(j.kv_precision);
    o.context = parse_decode_context(j.context);
    o.thresholds = thresholds_from_boundary(c.scenario_boundary);
    return o;
}

std::vector<RooflinePoint> join_all(const std::vector<RunRecord>& runs, const ArchConfig& arch,
                                    const JoinOptions& opts) {
    std::vector<RooflinePoint> points;
    for (const auto& r : runs) {
        JoinResult jr = join(r, arch, opts);
        if (jr.prefill_point) points.push_back(*jr.prefill_point);
        if (jr.decode_point) points.push_back(*jr.decode_point);
    }
    return points;
}

// -- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
    ArchArgs arch;
    DeviceArgs device;
    JoinArgs join;
    std::vector<std::string> runs;
    std::string mem;
    std::string out_dir;
};

int cmd_analyze(const AnalyzeArgs& a, const ToolConfig& c, std::ostream& out, std::ostream& err) {
    const ArchConfig arch = load_model(a.arch);
    const HardwareProfile profile = load_device(a.device);
    const ComputeKind kind = parse_compute_kind(a.device.ceiling);
    const Basis basis = parse_basis(a.device.basis);
    const RidgePoint r = ridge(profile, kind, basis);

    std::vector<RunRecord> runs = load_runs(a.runs, err);
    if (!a.mem.empty()) {
        const MemoryTrace trace = parse_memory_trace(read_text_file(a.mem));
        for (const auto& w : trace.warnings) {
            err << fmt::format("warning: {}:{}: {}\n", a.mem, w.line, w.message);
        }
        for (auto& run : runs) run.memory = trace.summary;
        out << fmt::format("memory: peak {:.1f} MiB, steady {:.1f} MiB over {} samples\n",
                           trace.summary.peak_bytes / 1048576.0,
                           trace.summary.steady_bytes / 1048576.0, trace.summary.samples);
    }

    const Evaluated e = evaluate(join_all(runs, arch, join_options(c, a.join)), r);
    out << fmt::format("{} on {}: ridge {:.2f} FLOPs/Byte ({} {})\n", arch.name, profile.name, r.oi,
                       to_string(kind), to_string(basis));
    print_points(e, c.phi_space, out);
    write_report(a.out_dir, e, profile, kind, basis, fmt::format("{} on {}", arch.name, profile.name),
                 out);
    return kOk;
}

// -- sweep ------------------------------------------------------------------

struct SweepArgs {
    ArchArgs arch;
    DeviceArgs device;
    std::string axis;
    std::string values;
    std::string weights = "fp16";
    std::string kv = "fp16";
    std::int64_t context = 1;
    std::string scenario_context = "mid";
    bool weights_only = false;
    std::string out_dir;
};

int cmd_sweep(const SweepArgs& a, const ToolConfig& c, std::ostream& out) {
    SweepSpec spec;
    spec.axis = parse_sweep_axis(a.axis);
    spec.values = parse_sweep_values(spec.axis, a.values);
    spec.arch = load_model(a.arch);
    spec.profile = load_device(a.device);
    spec.basis = parse_basis(a.device.basis);
    spec.ceiling = parse_compute_kind(a.device.ceiling);
    spec.cost = a.weights_only ? CostOptions::weights_only(c.convention, c.cost_mode) : cost_options(c);
    spec.weights = parse_precision(a.weights);
    spec.kv = parse_precision(a.kv);
    if (a.context < 1) throw ConfigError("--context-length must be at least 1");
    spec.context = a.context;
    spec.scenario_context = parse_decode_context(a.scenario_context);
    spec.thresholds = thresholds_from_boundary(c.scenario_boundary);

    const RidgePoint r = ridge(spec.profile, spec.ceiling, spec.basis);
    const Evaluated e = evaluate(run_sweep(spec), r);
    out << fmt::format("{} sweep of {} on {}: ridge {:.2f} FLOPs/Byte\n", to_string(spec.axis),
                       spec.arch.name, spec.profile.name, r.oi);
    print_points(e, c.phi_space, out);
    if (!a.out_dir.empty()) {
        write_report(a.out_dir, e, spec.profile, spec.ceiling, spec.basis,
                     fmt::format("{} sweep: {} on {}", to_string(spec.axis), spec.arch.name,
                                 spec.profile.name),
                     out);
    }
    return kOk;
}

// -- plot -------------------------------------------------------------------

int cmd_plot(const std::string& chart, const std::string& out_path, std::ostream& out) {
    const std::string svg = render_chart(chart_spec_from_json(read_text_file(chart)));
    if (out_path.empty() || out_path == "-") {
        out << svg;
    } else {
        write_text_file(out_path, svg);
        out << fmt::format("wrote {}\n", out_path);
    }
    return kOk;
}

// -- predict ----------------------------------------------------------------

struct PredictArgs {
    DeviceArgs device;
    double params = 0.0;
    std::string precision = "fp16";
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
    const HardwareProfile profile = load_device(a.device);
    const Precision prec = parse_precision(a.precision);
    const ComputeKind kind = parse_compute_kind(a.device.ceiling);
    const Basis basis = parse_basis(a.device.basis);
    const PredictedTiming t = predict_decode(a.params, prec, profile, kind, basis);
    out << fmt::format("{} on {} ({} {} ceiling), {:.4g} params at {}\n", "decode bound", profile.name,
                       to_string(kind), to_string(basis), a.params, to_string(prec.kind));
    out << fmt::format("t_comp = {:.2f} ms\n", t.t_comp_s * 1e3);
    out << fmt::format("t_mem = {:.2f} ms\n", t.t_mem_s * 1e3);
    out << fmt::format("bound {:.1f} tok/s, OI {:.4g} FLOPs/Byte, {}\n", t.bound_tps, t.implied_oi,
                       to_string(t.regime));
    return kOk;
}

// -- compare ----------------------------------------------------------------

struct CompareArgs {
    ArchArgs arch;
    DeviceArgs device;
    JoinArgs join;
    std::vector<std::string> runs;
};

int cmd_compare(const CompareArgs& a, const ToolConfig& c, std::ostream& out, std::ostream& err) {
    const ArchConfig arch = load_model(a.arch);
    const HardwareProfile profile = load_device(a.device);
    const RidgePoint r =
        ridge(profile, parse_compute_kind(a.device.ceiling), parse_basis(a.device.basis));
    const Evaluated e = evaluate(join_all(load_runs(a.runs, err), arch, join_options(c, a.join)), r);
    print_points(e, c.phi_space, out);

    const auto& phis = c.phi_space == PhiSpace::Raw ? e.raw : e.log10;
    out << "\npairwise:\n";
    for (std::size_t i = 0; i < phis.size(); ++i) {
        for (std::size_t j = i + 1; j < phis.size(); ++j) {
            const auto& li = e.points[i].label;
            const auto& lj = e.points[j].label;
            if (!phis[i].comparable_with(phis[j])) {
                out << fmt::format("  {} vs {}: incomparable ({} vs {})\n", li, lj,
                                   to_string(phis[i].regime), to_string(phis[j].regime));
                continue;
            }
            const double d = phis[i].value - phis[j].value;
            const std::string& closer = d < 0 ? li : lj;
            out << fmt::format("  {} vs {}: delta phi {:+.4f} ({})\n", li, lj, d,
                               d == 0 ? std::string("equal") : closer + " closer to the roof");
        }
    }
    return kOk;
}

// -- probe ------------------------------------------------------------------

struct ProbeArgs {
    bool bandwidth = false;
    bool flops = false;
    unsigned threads = 0;
    std::vector<std::size_t> sizes_mib;
    int repetitions = 10;
    std::string precision = "fp32";
    double min_trial = 0.05;
    std::string declare;
    std::string declare_name;
    std::string name;
    std::string out_path;
};

int cmd_probe(const ProbeArgs& a, std::ostream& out, std::ostream& err) {
    ProbeConfig cfg;
    cfg.threads = a.threads;
    cfg.repetitions = a.repetitions;
    cfg.warmup = std::min(3, a.repetitions);
    cfg.flops_precision = parse_compute_kind(a.precision);
    cfg.min_trial_seconds = a.min_trial;
    if (!a.sizes_mib.empty()) {
        cfg.buffer_bytes.clear();
        for (auto mib : a.sizes_mib) cfg.buffer_bytes.push_back(mib * kMiB);
    }
    validate(cfg);

    std::optional<HardwareProfile> declared;
    if (!a.declare.empty()) declared = load_profile(a.declare, a.declare_name);

    const bool both = !a.bandwidth && !a.flops;
    ProbeResult result;
    if (a.bandwidth || both) result.merge(measure_bandwidth(cfg));
    if (a.flops || both) result.merge(measure_flops(cfg));
    for (const auto& n : size_monotonicity_notes(result)) result.notes.push_back(n);

    const std::string name = !a.name.empty() ? a.name : declared ? declared->name : "host";
    const HardwareProfile profile = emit_profile(result, declared, name);
    for (const auto& line : result.environment) err << "env: " << line << '\n';
    for (const auto& line : result.notes) err << "note: " << line << '\n';
    for (const auto& line : sanity_notes(profile)) err << line << '\n';

    const std::string doc = dump_profile(profile);
    if (a.out_path.empty() || a.out_path == "-") {
        out << doc;
    } else {
        write_text_file(a.out_path, doc);
        out << fmt::format("wrote {}\n", a.out_path);
    }
    return kOk;
}

// -- catalog ----------------------------------------------------------------

int cmd_catalog(const std::string& which, std::ostream& out) {
    const fs::path dir = data_dir();
    if (which == "hardware") {
        const auto profiles = parse_profile_document(read_text_file(dir / "hardware_catalog.json"));
        out << fmt::format("{:<28} {:<13} {:>9} {:>9} {:>12} {:>12}\n", "device", "class",
                           "BW theo", "BW meas", "fp32 ridge", "fp16 ridge");
        for (const auto& p : profiles) {
            auto ridge_text = [&](ComputeKind k, Basis b) {
                try {
                    return fmt::format("{:.2f}", ridge(p, k, b).oi);
                } catch (const CapabilityError&) {
                    return std::string("-");
                }
            };
            auto bw = [](const std::optional<double>& v) {
                return v ? fmt::format("{:.2f}", *v) : std::string("-");
            };
            out << fmt::format("{:<28} {:<13} {:>9} {:>9} {:>12} {:>12}\n", p.name,
                               to_string(p.architecture_class), bw(p.bandwidth_gbps.theoretical),
                               bw(p.bandwidth_gbps.measured),
                               ridge_text(ComputeKind::FP32, Basis::Theoretical),
                               ridge_text(ComputeKind::FP16, Basis::Measured));
        }
        return kOk;
    }
    if (which == "arch") {
        const auto archs = parse_arch_document(read_text_file(dir / "arch_catalog.json"));
        out << fmt::format("{:<16} {:<5} {:>6} {:>4} {:>14}\n", "model", "attn", "H", "L", "params");
        for (const auto& a : archs) {
            out << fmt::format("{:<16} {:<5} {:>6} {:>4} {:>14}\n", a.name, to_string(a.attention),
                               a.hidden_dim, a.num_layers, a.n_params);
        }
        return kOk;
    }
    throw ConfigError(fmt::format("catalog: unknown catalog '{}' (expected hardware or arch)", which));
}

}  // namespace

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env) {
    CLI::App app{"Roofline analysis for LLM inference on heterogeneous hardware", "rooflinebench"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config_path, "JSON tool configuration");
    app.add_option("--convention", g.convention, "FLOP convention: fma|mac");
    app.add_option("--phi-space", g.phi_space, "raw|log10");
    app.add_option("--cost-mode", g.cost_mode, "detailed|approx");
    app.add_option("--scenario-boundary", g.boundary, "Short/long token boundary");
    app.add_option("--kv-write-traffic", g.kv_write, "on|off");
    app.add_option("--lm-head", g.lm_head, "on|off");

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Place llama-bench runs on a device roofline");
    add_arch_options(analyze, an.arch);
    add_device_options(analyze, an.device, "measured", "fp16");
    add_join_options(analyze, an.join);
    analyze->add_option("--runs", an.runs, "llama-bench JSON output")->required();
    analyze->add_option("--mem", an.mem, "timestamp_ms,rss_bytes trace");
    analyze->add_option("--out", an.out_dir, "Report directory")->required();

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Predicted points along one axis");
    add_arch_options(sweep, sw.arch);
    add_device_options(sweep, sw.device, "theoretical", "fp16");
    sweep->add_option("--axis", sw.axis, "layers|precision|scenario|context_length")->required();
    sweep->add_option("--values", sw.values, "e.g. 2,4,8 or 2..64*2 or fp16,q8_0 or 64:64")
        ->required();
    sweep->add_option("--precision", sw.weights, "Weight precision")->capture_default_str();
    sweep->add_option("--kv-precision", sw.kv, "KV cache precision")->capture_default_str();
    sweep->add_option("--context-length", sw.context, "Decode context for non-context axes")
        ->capture_default_str();
    sweep->add_option("--scenario-context", sw.scenario_context, "start|mid|end|exact")
        ->capture_default_str();
    sweep->add_flag("--weights-only", sw.weights_only, "Count weight traffic only");
    sweep->add_option("--out", sw.out_dir, "Report directory");

    std::string chart_path, plot_out;
    auto* plot = app.add_subcommand("plot", "Render a chart spec to SVG");
    plot->add_option("--chart", chart_path, "Chart spec JSON")->required();
    plot->add_option("--out", plot_out, "SVG path (default: stdout)");

    PredictArgs pr;
    auto* predict = app.add_subcommand("predict", "Decode timing bound for a parameter count");
    add_device_options(predict, pr.device, "theoretical", "fp32");
    predict->add_option("--params", pr.params, "Parameter count, e.g. 1.5e9")
        ->required()
        ->check(CLI::PositiveNumber);
    predict->add_option("--precision", pr.precision, "fp32|fp16|q8_0|q4_k_m|custom:<bytes>")
        ->capture_default_str();

    CompareArgs cmp;
    auto* compare = app.add_subcommand("compare", "Compare inference potential across runs");
    add_arch_options(compare, cmp.arch);
    add_device_options(compare, cmp.device, "measured", "fp16");
    add_join_options(compare, cmp.join);
    compare->add_option("--runs", cmp.runs, "llama-bench JSON files")->required();

    ProbeArgs pb;
    auto* probe = app.add_subcommand("probe", "Measure host bandwidth and FLOPS");
    probe->add_flag("--bandwidth", pb.bandwidth, "Run the STREAM kernels");
    probe->add_flag("--flops", pb.flops, "Run the FMA-chain kernels");
    probe->add_option("--threads", pb.threads, "Thread count (0 = all)")->capture_default_str();
    probe->add_option("--sizes-mib", pb.sizes_mib, "Per-array buffer sizes in MiB");
    probe->add_option("--repetitions", pb.repetitions, "Timed repetitions")->capture_default_str();
    probe->add_option("--precision", pb.precision, "fp32|fp64")->capture_default_str();
    probe->add_option("--min-trial-seconds", pb.min_trial, "Minimum duration of one trial")
        ->capture_default_str();
    probe->add_option("--declare", pb.declare, "Profile JSON with theoretical values");
    probe->add_option("--declare-name", pb.declare_name, "Profile name inside --declare");
    probe->add_option("--name", pb.name, "Name of the emitted profile");
    probe->add_option("--out", pb.out_path, "Output path (default: stdout)");

    std::string which = "hardware";
    auto* catalog = app.add_subcommand("catalog", "List bundled hardware or architectures");
    catalog->add_option("which", which, "hardware|arch")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUserError;
    }

    try {
        const ToolConfig config = resolve_config(g, env);
        if (analyze->parsed()) return cmd_analyze(an, config, out, err);
        if (sweep->parsed()) return cmd_sweep(sw, config, out);
        if (plot->parsed()) return cmd_plot(chart_path, plot_out, out);
        if (predict->parsed()) return cmd_predict(pr, out);
        if (compare->parsed()) return cmd_compare(cmp, config, out, err);
        if (probe->parsed()) return cmd_probe(pb, out, err);
        if (catalog->parsed()) return cmd_catalog(which, out);
        throw InvariantError("no subcommand dispatched");
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUserError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kUserError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return run(args, out, err, [](const char* name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name)) return std::string(v);
        return std::nullopt;
    });
}

}  // namespace rooflinebench::cli
