#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "rooflinebench/precision.hpp"

namespace rooflinebench {

enum class AttentionKind { MHA, GQA, MLA, GVA, GHA, GTA };
enum class FfnKind { Gated, Plain };

// How a multiply-accumulate is counted. Mac counts one unit per MAC (the
// cost table verbatim); Fma counts two, which matches hardware peak FLOPS.
enum class FlopsConvention { Mac, Fma };

// Detailed uses the per-layer breakdown below; Approx uses the
// 2 * n_params-per-token rule for W.
enum class CostMode { Detailed, Approx };

std::string_view to_string(AttentionKind kind);
std::string_view to_string(FfnKind kind);
std::string_view to_string(FlopsConvention convention);
std::string_view to_string(CostMode mode);
AttentionKind parse_attention_kind(std::string_view text);
FfnKind parse_ffn_kind(std::string_view text);
FlopsConvention parse_convention(std::string_view text);
CostMode parse_cost_mode(std::string_view text);

inline double convention_factor(FlopsConvention c) {
    return c == FlopsConvention::Fma ? 2.0 : 1.0;
}

// Structural description of a decoder-only transformer.
//
// Fields that only some attention variants use are optional; cost
// functions throw ConfigError naming the missing field when the active
// variant needs it. n_h falls back to n_q when absent.
struct ArchConfig {
    std::string name;
    AttentionKind attention = AttentionKind::MHA;
    std::int64_t hidden_dim = 0;  // H
    std::int64_t num_layers = 0;  // L
    std::optional<std::int64_t> n_q, n_k, n_v, n_h, n_c;
    std::optional<std::int64_t> d_h, d_l, d_c, d_rope, d_nope;
    std::int64_t ffn_dim = 0;
    FfnKind ffn_kind = FfnKind::Gated;
    std::int64_t vocab_size = 0;  // V
    std::int64_t n_params = 0;
    bool tied_embeddings = true;

    friend bool operator==(const ArchConfig&, const ArchConfig&) = default;
};

// Throws ConfigError on the first violated structural invariant.
void validate(const ArchConfig& arch);

// Resolved head counts (n_h defaults to n_q).
std::int64_t total_heads(const ArchConfig& arch);

// Parameters held by the embedding (and untied output) matrices.
std::int64_t embedding_params(const ArchConfig& arch);

// Elements stored in one layer's KV cache after N tokens.
double kv_cache_elements_per_layer(const ArchConfig& arch, std::int64_t n_tokens);

// Per-layer attention-score and value-aggregation work over a full
// sequence of N tokens (quadratic in N).
double attention_flops_sequence(const ArchConfig& arch, std::int64_t n_tokens,
                                FlopsConvention convention);

// Per-layer projection work for one token (the cost-table "Linear" column
// divided by N), in MACs.
double linear_macs_per_token(const ArchConfig& arch);

// Per-layer FFN work for one token, in MACs.
double ffn_macs_per_token(const ArchConfig& arch);

struct CostBreakdown {
    double flops_attention = 0.0;
    double flops_linear = 0.0;
    double flops_ffn = 0.0;
    double flops_lm_head = 0.0;
    double bytes_weights = 0.0;
    double bytes_kv_read = 0.0;
    double bytes_kv_write = 0.0;

    double total_flops() const {
        return flops_attention + flops_linear + flops_ffn + flops_lm_head;
    }
    double total_bytes() const { return bytes_weights + bytes_kv_read + bytes_kv_write; }

    // Multiplies every FLOPs and bytes field by factor.
    CostBreakdown scaled(double factor) const;
};

struct CostOptions {
    FlopsConvention convention = FlopsConvention::Fma;
    CostMode mode = CostMode::Detailed;
    bool include_lm_head = true;
    bool kv_read_traffic = true;
    bool kv_write_traffic = true;
    // When false, bytes_weights excludes the embedding parameters so that
    // traffic scales exactly with depth.
    bool embedding_weight_traffic = true;

    // Weights-only accounting: no KV traffic, no LM head.
    static CostOptions weights_only(FlopsConvention convention, CostMode mode) {
        CostOptions o;
        o.convention = convention;
        o.mode = mode;
        o.include_lm_head = false;
        o.kv_read_traffic = false;
        o.kv_write_traffic = false;
        return o;
    }
};

// FLOPs (W) and bytes (Q) of one autoregressive decode step attending to N
// cached tokens. Throws DomainError for N < 1.
CostBreakdown decode_step_cost(const ArchConfig& arch, std::int64_t n_context,
                               const Precision& weights, const Precision& kv,
                               const CostOptions& options);

// W and Q of processing an n_prompt-token prompt in one pass: weights are
// streamed once and the KV cache for every prompt token is written.
CostBreakdown prefill_cost(const ArchConfig& arch, std::int64_t n_prompt,
                           const Precision& weights, const Precision& kv,
                           const CostOptions& options);

// Copy of arch at a different depth with n_params rescaled as
// embedding + per_layer * new_layers (per-layer count rounded).
ArchConfig scale_layers(const ArchConfig& arch, std::int64_t new_layers);

}  // namespace rooflinebench
