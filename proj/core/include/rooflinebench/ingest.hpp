#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rooflinebench/arch.hpp"
#include "rooflinebench/roofline.hpp"

namespace rooflinebench {

struct MemorySummary {
    double peak_bytes = 0.0;
    double steady_bytes = 0.0;
    std::int64_t samples = 0;

    friend bool operator==(const MemorySummary&, const MemorySummary&) = default;
};

// One benchmarked configuration: prompt-processing and/or generation
// throughput for a (model, n_prompt, n_gen) triple.
struct RunRecord {
    std::string model_name;
    std::int64_t model_n_params = 0;
    std::string quant_label;
    std::int64_t n_prompt = 0;
    std::int64_t n_gen = 0;
    std::optional<double> prefill_tps;
    std::optional<double> decode_tps;
    std::optional<double> stddev_ts;
    std::string backend;
    std::string device;
    std::string build_commit;
    std::string timestamp;
    std::optional<MemorySummary> memory;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct RowError {
    std::size_t row = 0;
    std::string message;
};

struct ParseReport {
    std::vector<RunRecord> records;
    std::vector<RowError> errors;
};

// Parses llama-bench `-o json` output. Each row contributes its avg_ts to
// prefill_tps (prompt-processing tests) or decode_tps (generation tests);
// rows sharing (model, quant, n_prompt, n_gen) merge into one record.
// The test kind comes from an optional "test" label ("pp..."/"tg...") and
// is otherwise inferred from n_gen == 0 (pp) or n_prompt == 0 (tg).
// Malformed rows are reported, never thrown; only a document that is not a
// JSON array throws SchemaError.
ParseReport parse_llama_bench(std::string_view json_text);

// Normalized RunRecord export and its inverse.
std::string records_to_json(const std::vector<RunRecord>& records);
std::vector<RunRecord> records_from_json(std::string_view json_text);

enum class Scenario { SISO, SILO, LISO, LILO };
std::string_view to_string(Scenario scenario);

struct ScenarioThresholds {
    std::int64_t short_max = 512;
    std::int64_t long_min = 513;
};

// Short iff the token count is <= short_max. Total over all inputs.
Scenario classify_scenario(std::int64_t n_prompt, std::int64_t n_gen,
                           const ScenarioThresholds& thresholds = {});

ScenarioThresholds thresholds_from_boundary(std::int64_t boundary);

struct TraceWarning {
    std::size_t line = 0;
    std::string message;
};

struct MemoryTrace {
    MemorySummary summary;
    std::vector<TraceWarning> warnings;  // non-monotone timestamps, skipped rows
};

// `timestamp_ms,rss_bytes` CSV. Peak is the maximum sample; steady is the
// median of the final quarter of samples. Throws SchemaError when no
// sample survives.
MemoryTrace parse_memory_trace(std::string_view csv_text);

// Where along the generation window the decode cost is evaluated.
enum class DecodeContext { Start, Mid, End, ExactIntegral };
DecodeContext parse_decode_context(std::string_view text);

struct JoinOptions {
    CostOptions cost;
    Precision kv_precision = Precision::fp16();
    DecodeContext context = DecodeContext::Mid;
    ScenarioThresholds thresholds;
    double params_tolerance = 0.10;
};

// Decode cost representative of generating n_gen tokens after an
// n_prompt-token prompt, evaluated at the chosen context position.
CostBreakdown representative_decode_cost(const ArchConfig& arch, std::int64_t n_prompt,
                                         std::int64_t n_gen, const Precision& weights,
                                         const Precision& kv, const CostOptions& cost,
                                         DecodeContext context);

struct JoinResult {
    Scenario scenario = Scenario::SISO;
    std::optional<RooflinePoint> prefill_point;
    std::optional<RooflinePoint> decode_point;
    CostBreakdown decode_cost;
    CostBreakdown prefill_cost;
};

// Places a measured record on the roofline plane using the analytical cost
// of `arch`. Throws JoinError when the quant label is unknown or the
// parameter counts differ by more than the tolerance.
JoinResult join(const RunRecord& record, const ArchConfig& arch, const JoinOptions& options);

}  // namespace rooflinebench
