#include "rooflinebench/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "json_util.hpp"
#include "text_util.hpp"

namespace rooflinebench {

using detail::json;
using detail::ordered_json;

namespace {

enum class TestKind { Prompt, Generation };

// Finds a known quant label among the whitespace/punctuation separated
// tokens of a model_type or file name ("qwen2 1.5B F16",
// "qwen2.5-1.5b-instruct-q4_k_m.gguf").
std::string quant_from_text(std::string_view text) {
    const std::string u = detail::upper(text);
    // Longest labels first so Q4_K_M is not read as something shorter.
    static const char* const labels[] = {"Q4_K_M", "Q8_0", "BF16", "F16", "F32"};
    for (const char* label : labels) {
        const std::string_view l(label);
        for (std::size_t pos = u.find(l); pos != std::string::npos; pos = u.find(l, pos + 1)) {
            const bool left_ok = pos == 0 || !std::isalnum(static_cast<unsigned char>(u[pos - 1]));
            const std::size_t end = pos + l.size();
            const bool right_ok =
                end == u.size() || !(std::isalnum(static_cast<unsigned char>(u[end])) || u[end] == '_');
            if (left_ok && right_ok) return std::string(l);
        }
    }
    return {};
}

struct ParsedRow {
    RunRecord record;
    TestKind kind = TestKind::Generation;
    double avg_ts = 0.0;
};

ParsedRow parse_row(const json& row, std::size_t index) {
    const std::string where = fmt::format("row[{}]", index);
    detail::require_object(row, where);
    ParsedRow out;
    RunRecord& r = out.record;

    auto model_type = detail::opt_string(row, "model_type", where);
    auto model_file = detail::opt_string(row, "model_filename", where);
    if (model_type && !model_type->empty()) {
        r.model_name = *model_type;
    } else if (model_file && !model_file->empty()) {
        r.model_name = *model_file;
    } else {
        throw SchemaError(where + ": missing model_type or model_filename");
    }
    r.quant_label = quant_from_text(model_type.value_or(""));
    if (r.quant_label.empty()) r.quant_label = quant_from_text(model_file.value_or(""));

    r.model_n_params = detail::required(detail::opt_integer(row, "model_n_params", where),
                                        "model_n_params", where, "integer");
    r.n_prompt =
        detail::required(detail::opt_integer(row, "n_prompt", where), "n_prompt", where, "integer");
    r.n_gen = detail::required(detail::opt_integer(row, "n_gen", where), "n_gen", where, "integer");
    if (r.n_prompt < 0 || r.n_gen < 0 || (r.n_prompt == 0 && r.n_gen == 0)) {
        throw SchemaError(fmt::format("{}: token counts must be non-negative and not both zero "
                                      "(n_prompt={}, n_gen={})",
                                      where, r.n_prompt, r.n_gen));
    }
    out.avg_ts = detail::required(detail::opt_number(row, "avg_ts", where), "avg_ts", where, "number");
    if (!(out.avg_ts > 0.0)) {
        throw SchemaError(fmt::format("{}.avg_ts: must be positive, got {}", where, out.avg_ts));
    }
    r.stddev_ts = detail::opt_number(row, "stddev_ts", where);

    if (auto backends = detail::opt_string(row, "backends", where)) {
        r.backend = *backends;
    } else {
        r.backend = detail::opt_string(row, "backend", where).value_or("");
    }
    r.device = detail::opt_string(row, "gpu_info", where).value_or("");
    if (r.device.empty()) r.device = detail::opt_string(row, "cpu_info", where).value_or("");
    r.build_commit = detail::opt_string(row, "build_commit", where).value_or("");
    r.timestamp = detail::opt_string(row, "test_time", where).value_or("");

    if (auto test = detail::opt_string(row, "test", where)) {
        const std::string t = detail::lower(*test);
        if (t.rfind("pp", 0) == 0) {
            out.kind = TestKind::Prompt;
        } else if (t.rfind("tg", 0) == 0) {
            out.kind = TestKind::Generation;
        } else {
            throw SchemaError(fmt::format("{}.test: unsupported test label '{}'", where, *test));
        }
    } else if (r.n_gen == 0) {
        out.kind = TestKind::Prompt;
    } else if (r.n_prompt == 0) {
        out.kind = TestKind::Generation;
    } else {
        throw SchemaError(where + ": combined prompt+generation row needs a 'test' label");
    }
    if (out.kind == TestKind::Prompt && r.n_prompt == 0) {
        throw SchemaError(where + ": prompt-processing row has n_prompt = 0");
    }
    if (out.kind == TestKind::Generation && r.n_gen == 0) {
        throw SchemaError(where + ": generation row has n_gen = 0");
    }
    return out;
}

}  // namespace

ParseReport parse_llama_bench(std::string_view json_text) {
    const json doc = detail::parse_json(json_text, "llama-bench");
    if (!doc.is_array()) {
        throw SchemaError(fmt::format("llama-bench: expected a JSON array of results, got {}",
                                      doc.type_name()));
    }
    ParseReport report;
    using Key = std::tuple<std::string, std::string, std::int64_t, std::int64_t>;
    std::map<Key, std::size_t> slot;

    for (std::size_t i = 0; i < doc.size(); ++i) {
        ParsedRow row;
        try {
            row = parse_row(doc[i], i);
        } catch (const Error& e) {
            report.errors.push_back({i, e.what()});
            continue;
        }
        const RunRecord& r = row.record;
        const Key key{r.model_name, r.quant_label, r.n_prompt, r.n_gen};
        auto [it, inserted] = slot.emplace(key, report.records.size());
        if (inserted) report.records.push_back(r);
        RunRecord& target = report.records[it->second];

        std::optional<double>& field =
            row.kind == TestKind::Prompt ? target.prefill_tps : target.decode_tps;
        if (field) {
            report.errors.push_back(
                {i, fmt::format("row[{}]: duplicate {} result for {} ({}, {})", i,
                                row.kind == TestKind::Prompt ? "prompt" : "generation",
                                r.model_name, r.n_prompt, r.n_gen)});
            continue;
        }
        field = row.avg_ts;
        if (row.kind == TestKind::Generation && r.stddev_ts) target.stddev_ts = r.stddev_ts;
    }
    return report;
}

std::string records_to_json(const std::vector<RunRecord>& records) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : records) {
        ordered_json j;
        j["model_name"] = r.model_name;
        j["model_n_params"] = r.model_n_params;
        j["quant_label"] = r.quant_label;
        j["n_prompt"] = r.n_prompt;
        j["n_gen"] = r.n_gen;
        if (r.prefill_tps) j["prefill_tps"] = *r.prefill_tps;
        if (r.decode_tps) j["decode_tps"] = *r.decode_tps;
        if (r.stddev_ts) j["stddev_ts"] = *r.stddev_ts;
        j["backend"] = r.backend;
        j["device"] = r.device;
        j["build_commit"] = r.build_commit;
        j["timestamp"] = r.timestamp;
        if (r.memory) {
            j["memory"] = {{"peak_bytes", r.memory->peak_bytes},
                           {"steady_bytes", r.memory->steady_bytes},
                           {"samples", r.memory->samples}};
        }
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::vector<RunRecord> records_from_json(std::string_view json_text) {
    const json doc = detail::parse_json(json_text, "records");
    if (!doc.is_array()) throw SchemaError("records: expected a JSON array");
    std::vector<RunRecord> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::string where = fmt::format("records[{}]", i);
        const json& j = doc[i];
        detail::require_object(j, where);
        detail::reject_unknown_keys(j,
                                    {"model_name", "model_n_params", "quant_label", "n_prompt",
                                     "n_gen", "prefill_tps", "decode_tps", "stddev_ts", "backend",
                                     "device", "build_commit", "timestamp", "memory"},
                                    where);
        RunRecord r;
        r.model_name = detail::required(detail::opt_string(j, "model_name", where), "model_name",
                                        where, "string");
        r.model_n_params = detail::required(detail::opt_integer(j, "model_n_params", where),
                                            "model_n_params", where, "integer");
        r.quant_label = detail::opt_string(j, "quant_label", where).value_or("");
        r.n_prompt = detail::required(detail::opt_integer(j, "n_prompt", where), "n_prompt", where,
                                      "integer");
        r.n_gen =
            detail::required(detail::opt_integer(j, "n_gen", where), "n_gen", where, "integer");
        r.prefill_tps = detail::opt_number(j, "prefill_tps", where);
        r.decode_tps = detail::opt_number(j, "decode_tps", where);
        r.stddev_ts = detail::opt_number(j, "stddev_ts", where);
        r.backend = detail::opt_string(j, "backend", where).value_or("");
        r.device = detail::opt_string(j, "device", where).value_or("");
        r.build_commit = detail::opt_string(j, "build_commit", where).value_or("");
        r.timestamp = detail::opt_string(j, "timestamp", where).value_or("");
        if (auto m = j.find("memory"); m != j.end() && !m->is_null()) {
            const std::string mw = where + ".memory";
            detail::require_object(*m, mw);
            MemorySummary s;
            s.peak_bytes = detail::required(detail::opt_number(*m, "peak_bytes", mw), "peak_bytes",
                                            mw, "number");
            s.steady_bytes = detail::required(detail::opt_number(*m, "steady_bytes", mw),
                                              "steady_bytes", mw, "number");
            s.samples =
                detail::required(detail::opt_integer(*m, "samples", mw), "samples", mw, "integer");
            r.memory = s;
        }
        if (!r.prefill_tps && !r.decode_tps) {
            throw SchemaError(where + ": needs prefill_tps or decode_tps");
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string_view to_string(Scenario scenario) {
    switch (scenario) {
        case Scenario::SISO: return "SISO";
        case Scenario::SILO: return "SILO";
        case Scenario::LISO: return "LISO";
        case Scenario::LILO: return "LILO";
    }
    return "?";
}

ScenarioThresholds thresholds_from_boundary(std::int64_t boundary) {
    if (boundary < 0) {
        throw ConfigError(fmt::format("scenario_boundary must be non-negative, got {}", boundary));
    }
    return {boundary, boundary + 1};
}

Scenario classify_scenario(std::int64_t n_prompt, std::int64_t n_gen,
                           const ScenarioThresholds& thresholds) {
    const bool short_in = n_prompt <= thresholds.short_max;
    const bool short_out = n_gen <= thresholds.short_max;
    if (short_in) return short_out ? Scenario::SISO : Scenario::SILO;
    return short_out ? Scenario::LISO : Scenario::LILO;
}

namespace {

std::optional<double> parse_number(std::string_view s) {
    s = detail::trim(s);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

}  // namespace

MemoryTrace parse_memory_trace(std::string_view csv_text) {
    MemoryTrace trace;
    std::vector<double> rss;
    std::optional<double> last_ts;
    std::size_t line_no = 0;
    bool header_seen = false;

    std::size_t pos = 0;
    while (pos <= csv_text.size()) {
        std::size_t nl = csv_text.find('\n', pos);
        if (nl == std::string_view::npos) nl = csv_text.size();
        std::string_view line = csv_text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (detail::trim(line).empty()) continue;

        if (!header_seen) {
            std::string header(detail::trim(line));
            header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
            if (header != "timestamp_ms,rss_bytes") {
                throw SchemaError(fmt::format(
                    "memory trace: expected header 'timestamp_ms,rss_bytes', got '{}'", line));
            }
            header_seen = true;
            continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
            trace.warnings.push_back({line_no, "expected two columns; row skipped"});
            continue;
        }
        auto ts = parse_number(line.substr(0, comma));
        auto bytes = parse_number(line.substr(comma + 1));
        if (!ts || !bytes || *bytes < 0) {
            trace.warnings.push_back({line_no, "non-numeric or negative cell; row skipped"});
            continue;
        }
        if (last_ts && *ts < *last_ts) {
            trace.warnings.push_back({line_no, "timestamp decreases; row kept"});
        }
        last_ts = ts;
        rss.push_back(*bytes);
    }
    if (!header_seen) throw SchemaError("memory trace: no samples (empty document)");
    if (rss.empty()) throw SchemaError("memory trace: no samples");

    const std::size_t n = rss.size();
    const std::size_t tail = std::max<std::size_t>(1, (n + 3) / 4);
    std::vector<double> last(rss.end() - static_cast<std::ptrdiff_t>(tail), rss.end());
    std::sort(last.begin(), last.end());
    const double med = tail % 2 ? last[tail / 2] : 0.5 * (last[tail / 2 - 1] + last[tail / 2]);

    trace.summary.peak_bytes = *std::max_element(rss.begin(), rss.end());
    trace.summary.steady_bytes = med;
    trace.summary.samples = static_cast<std::int64_t>(n);
    return trace;
}

DecodeContext parse_decode_context(std::string_view text) {
    const std::string l = detail::lower(detail::trim(text));
    if (l == "start") return DecodeContext::Start;
    if (l == "mid") return DecodeContext::Mid;
    if (l == "end") return DecodeContext::End;
    if (l == "exact-integral" || l == "exact") return DecodeContext::ExactIntegral;
    throw ConfigError(fmt::format(
        "decode context: unknown value '{}' (expected start, mid, end or exact-integral)", text));
}

CostBreakdown representative_decode_cost(const ArchConfig& arch, std::int64_t n_prompt,
                                         std::int64_t n_gen, const Precision& weights,
                                         const Precision& kv, const CostOptions& cost,
                                         DecodeContext context) {
    const std::int64_t start = std::max<std::int64_t>(1, n_prompt);
    switch (context) {
        case DecodeContext::Start:
            return decode_step_cost(arch, start, weights, kv, cost);
        case DecodeContext::Mid:
            return decode_step_cost(arch, std::max<std::int64_t>(1, n_prompt + n_gen / 2), weights,
                                    kv, cost);
        case DecodeContext::End:
            return decode_step_cost(arch, std::max<std::int64_t>(1, n_prompt + n_gen), weights, kv,
                                    cost);
        case DecodeContext::ExactIntegral: {
            if (n_gen <= 0) return decode_step_cost(arch, start, weights, kv, cost);
            CostBreakdown sum;
            for (std::int64_t step = 1; step <= n_gen; ++step) {
                const auto c = decode_step_cost(arch, n_prompt + step, weights, kv, cost);
                sum.flops_attention += c.flops_attention;
                sum.flops_linear += c.flops_linear;
                sum.flops_ffn += c.flops_ffn;
                sum.flops_lm_head += c.flops_lm_head;
                sum.bytes_weights += c.bytes_weights;
                sum.bytes_kv_read += c.bytes_kv_read;
                sum.bytes_kv_write += c.bytes_kv_write;
            }
            return sum.scaled(1.0 / static_cast<double>(n_gen));
        }
    }
    throw InvariantError("unhandled decode context");
}

JoinResult join(const RunRecord& record, const ArchConfig& arch, const JoinOptions& options) {
    const auto weights = precision_from_quant_label(record.quant_label);
    if (!weights) {
        std::string known;
        for (const auto& l : known_quant_labels()) known += known.empty() ? l : ", " + l;
        throw JoinError(fmt::format("{}: unknown quant label '{}' (known: {})", record.model_name,
                                    record.quant_label, known));
    }
    const double recorded = static_cast<double>(record.model_n_params);
    const double modeled = static_cast<double>(arch.n_params);
    if (!(recorded > 0.0) ||
        std::abs(modeled - recorded) > options.params_tolerance * recorded) {
        throw JoinError(fmt::format(
            "parameter mismatch: run '{}' reports {} parameters but architecture '{}' has {}",
            record.model_name, record.model_n_params, arch.name, arch.n_params));
    }

    JoinResult out;
    out.scenario = classify_scenario(record.n_prompt, record.n_gen, options.thresholds);
    const std::string scenario(to_string(out.scenario));
    // llama-bench model_type strings usually end with the quant already.
    const bool named = detail::upper(record.model_name).ends_with(detail::upper(record.quant_label));
    const std::string model =
        named ? record.model_name : fmt::format("{} {}", record.model_name, record.quant_label);
    const std::string base = fmt::format("{} p{}/g{}", model, record.n_prompt, record.n_gen);

    if (record.decode_tps) {
        if (!(*record.decode_tps > 0.0)) throw JoinError(base + ": decode_tps must be positive");
        out.decode_cost = representative_decode_cost(arch, record.n_prompt, record.n_gen, *weights,
                                                     options.kv_precision, options.cost,
                                                     options.context);
        auto p = to_point(out.decode_cost, 1.0 / *record.decode_tps, base + " decode");
        p.scenario = scenario;
        out.decode_point = std::move(p);
    }
    if (record.prefill_tps && record.n_prompt > 0) {
        if (!(*record.prefill_tps > 0.0)) throw JoinError(base + ": prefill_tps must be positive");
        out.prefill_cost =
            prefill_cost(arch, record.n_prompt, *weights, options.kv_precision, options.cost);
        const double latency = static_cast<double>(record.n_prompt) / *record.prefill_tps;
        auto p = to_point(out.prefill_cost, latency, base + " prefill");
        p.scenario = scenario;
        out.prefill_point = std::move(p);
    }
    return out;
}

}  // namespace rooflinebench
