#include "rooflinebench/arch.hpp"

#include <cmath>

#include <fmt/format.h>

#include "rooflinebench/error.hpp"
#include "text_util.hpp"

namespace rooflinebench {
namespace {

double need(const std::optional<std::int64_t>& value, std::string_view field,
            const ArchConfig& arch) {
    if (!value) {
        throw ConfigError(fmt::format("{}: field '{}' is required for {} attention",
                                      arch.name, field, to_string(arch.attention)));
    }
    return static_cast<double>(*value);
}

double heads(const ArchConfig& arch) {
    if (arch.n_h) return static_cast<double>(*arch.n_h);
    return need(arch.n_q, "n_h", arch);
}

void check_positive(std::int64_t value, std::string_view field, const ArchConfig& arch) {
    if (value <= 0) {
        throw ConfigError(fmt::format("{}: field '{}' must be positive, got {}", arch.name,
                                      field, value));
    }
}

void check_optional(const std::optional<std::int64_t>& value, std::string_view field,
                    const ArchConfig& arch, bool allow_zero = false) {
    if (!value) return;
    if (*value < 0 || (*value == 0 && !allow_zero)) {
        throw ConfigError(fmt::format("{}: field '{}' must be {}, got {}", arch.name, field,
                                      allow_zero ? "non-negative" : "positive", *value));
    }
}

void check_token_count(std::int64_t n) {
    if (n < 0) throw DomainError(fmt::format("token count must be non-negative, got {}", n));
}

void check_precision(const Precision& p, std::string_view what) {
    if (!(p.bytes_per_weight > 0.0)) {
        throw ConfigError(fmt::format("{}: bytes per element must be positive, got {}", what,
                                      p.bytes_per_weight));
    }
}

}  // namespace

std::string_view to_string(AttentionKind kind) {
    switch (kind) {
        case AttentionKind::MHA: return "MHA";
        case AttentionKind::GQA: return "GQA";
        case AttentionKind::MLA: return "MLA";
        case AttentionKind::GVA: return "GVA";
        case AttentionKind::GHA: return "GHA";
        case AttentionKind::GTA: return "GTA";
    }
    return "?";
}

std::string_view to_string(FfnKind kind) {
    return kind == FfnKind::Gated ? "gated" : "plain";
}

std::string_view to_string(FlopsConvention convention) {
    return convention == FlopsConvention::Fma ? "fma" : "mac";
}

std::string_view to_string(CostMode mode) {
    return mode == CostMode::Detailed ? "detailed" : "approx";
}

AttentionKind parse_attention_kind(std::string_view text) {
    const std::string u = detail::upper(detail::trim(text));
    for (auto k : {AttentionKind::MHA, AttentionKind::GQA, AttentionKind::MLA,
                   AttentionKind::GVA, AttentionKind::GHA, AttentionKind::GTA}) {
        if (u == to_string(k)) return k;
    }
    throw ConfigError(fmt::format(
        "attention: unknown variant '{}' (expected MHA, GQA, MLA, GVA, GHA or GTA)", text));
}

FfnKind parse_ffn_kind(std::string_view text) {
    const std::string l = detail::lower(detail::trim(text));
    if (l == "gated") return FfnKind::Gated;
    if (l == "plain") return FfnKind::Plain;
    throw ConfigError(fmt::format("ffn_kind: unknown value '{}' (expected gated or plain)", text));
}

FlopsConvention parse_convention(std::string_view text) {
    const std::string l = detail::lower(detail::trim(text));
    if (l == "fma") return FlopsConvention::Fma;
    if (l == "mac") return FlopsConvention::Mac;
    throw ConfigError(fmt::format("convention: unknown value '{}' (expected mac or fma)", text));
}

CostMode parse_cost_mode(std::string_view text) {
    const std::string l = detail::lower(detail::trim(text));
    if (l == "detailed") return CostMode::Detailed;
    if (l == "approx") return CostMode::Approx;
    throw ConfigError(
        fmt::format("cost_mode: unknown value '{}' (expected detailed or approx)", text));
}

void validate(const ArchConfig& arch) {
    if (arch.name.empty()) throw ConfigError("name: architecture name must not be empty");
    check_positive(arch.hidden_dim, "hidden_dim", arch);
    check_positive(arch.num_layers, "num_layers", arch);
    check_positive(arch.ffn_dim, "ffn_dim", arch);
    check_positive(arch.vocab_size, "vocab_size", arch);
    check_positive(arch.n_params, "n_params", arch);
    check_optional(arch.n_q, "n_q", arch);
    check_optional(arch.n_k, "n_k", arch);
    check_optional(arch.n_v, "n_v", arch);
    check_optional(arch.n_h, "n_h", arch);
    check_optional(arch.n_c, "n_c", arch);
    check_optional(arch.d_h, "d_h", arch);
    check_optional(arch.d_l, "d_l", arch);
    check_optional(arch.d_c, "d_c", arch);
    check_optional(arch.d_rope, "d_rope", arch, true);
    check_optional(arch.d_nope, "d_nope", arch, true);

    switch (arch.attention) {
        case AttentionKind::MHA:
        case AttentionKind::GQA:
        case AttentionKind::GVA:
        case AttentionKind::GHA: {
            const double nq = need(arch.n_q, "n_q", arch);
            const double dh = need(arch.d_h, "d_h", arch);
            if (nq * dh != static_cast<double>(arch.hidden_dim)) {
                throw ConfigError(fmt::format("{}: n_q * d_h = {} must equal hidden_dim {}",
                                              arch.name, nq * dh, arch.hidden_dim));
            }
            break;
        }
        case AttentionKind::MLA:
        case AttentionKind::GTA: break;
    }

    if (arch.attention == AttentionKind::GQA) {
        const auto nq = static_cast<std::int64_t>(need(arch.n_q, "n_q", arch));
        const auto nk = static_cast<std::int64_t>(need(arch.n_k, "n_k", arch));
        if (nk > nq || nq % nk != 0) {
            throw ConfigError(fmt::format(
                "{}: GQA needs n_k <= n_q and n_q divisible by n_k (n_q={}, n_k={})", arch.name,
                nq, nk));
        }
    }
    if (arch.attention == AttentionKind::MLA) {
        const double rope = need(arch.d_rope, "d_rope", arch);
        const double nope = need(arch.d_nope, "d_nope", arch);
        if (rope + nope <= 0) {
            throw ConfigError(fmt::format("{}: MLA needs d_rope + d_nope > 0", arch.name));
        }
    }

    // Resolve every variant-required field up front so errors surface on load.
    (void)kv_cache_elements_per_layer(arch, 1);
    (void)attention_flops_sequence(arch, 1, FlopsConvention::Mac);
    (void)linear_macs_per_token(arch);
}

std::int64_t total_heads(const ArchConfig& arch) {
    return static_cast<std::int64_t>(heads(arch));
}

std::int64_t embedding_params(const ArchConfig& arch) {
    const std::int64_t one = arch.hidden_dim * arch.vocab_size;
    return arch.tied_embeddings ? one : 2 * one;
}

double kv_cache_elements_per_layer(const ArchConfig& arch, std::int64_t n_tokens) {
    check_token_count(n_tokens);
    const double n = static_cast<double>(n_tokens);
    const double hd = static_cast<double>(arch.hidden_dim);
    switch (arch.attention) {
        case AttentionKind::MHA:
            return 2.0 * heads(arch) * need(arch.d_h, "d_h", arch) * n;
        case AttentionKind::GQA:
            return 2.0 * need(arch.n_k, "n_k", arch) * need(arch.d_h, "d_h", arch) * n;
        case AttentionKind::MLA:
            return (need(arch.d_c, "d_c", arch) + need(arch.d_rope, "d_rope", arch)) * n;
        case AttentionKind::GVA:
            return (hd + need(arch.n_k, "n_k", arch) * need(arch.d_h, "d_h", arch)) * n;
        case AttentionKind::GHA: {
            const double dh = need(arch.d_h, "d_h", arch);
            return (need(arch.n_k, "n_k", arch) * dh + need(arch.n_v, "n_v", arch) * dh) * n;
        }
        case AttentionKind::GTA:
            return (need(arch.n_k, "n_k", arch) * need(arch.d_h, "d_h", arch) +
                    need(arch.n_c, "n_c", arch) * need(arch.d_l, "d_l", arch)) *
                   n;
    }
    throw InvariantError("unhandled attention kind");
}

namespace {

// Attention-column coefficient c such that sequence work is c * N^2 MACs
// and single-query decode work is c * N MACs.
double attention_coefficient(const ArchConfig& arch) {
    switch (arch.attention) {
        case AttentionKind::MHA:
        case AttentionKind::GQA:
            return 2.0 * heads(arch) * need(arch.d_h, "d_h", arch);
        case AttentionKind::MLA:
            return heads(arch) *
                   (need(arch.d_rope, "d_rope", arch) + 2.0 * need(arch.d_nope, "d_nope", arch));
        case AttentionKind::GVA:
        case AttentionKind::GHA: {
            const double dh = need(arch.d_h, "d_h", arch);
            return need(arch.n_q, "n_q", arch) * dh + heads(arch) * dh;
        }
        case AttentionKind::GTA:
            // d_k is read as the per-head dimension d_h.
            return need(arch.n_q, "n_q", arch) *
                   (need(arch.d_h, "d_h", arch) + need(arch.d_l, "d_l", arch));
    }
    throw InvariantError("unhandled attention kind");
}

}  // namespace

double attention_flops_sequence(const ArchConfig& arch, std::int64_t n_tokens,
                                FlopsConvention convention) {
    check_token_count(n_tokens);
    const double n = static_cast<double>(n_tokens);
    return attention_coefficient(arch) * n * n * convention_factor(convention);
}

double linear_macs_per_token(const ArchConfig& arch) {
    const double h = static_cast<double>(arch.hidden_dim);
    switch (arch.attention) {
        case AttentionKind::MHA: return 4.0 * h * h;
        case AttentionKind::GQA:
        case AttentionKind::GVA:
            return 2.0 * h * h + 2.0 * need(arch.n_k, "n_k", arch) * need(arch.d_h, "d_h", arch) * h;
        case AttentionKind::MLA: {
            const double rope = need(arch.d_rope, "d_rope", arch);
            const double nope = need(arch.d_nope, "d_nope", arch);
            const double nh = heads(arch);
            return (need(arch.d_c, "d_c", arch) + rope) * h + nh * (rope + nope) * h +
                   2.0 * nh * need(arch.d_l, "d_l", arch) * nope + h * h;
        }
        case AttentionKind::GHA: {
            const double dh = need(arch.d_h, "d_h", arch);
            return h * h + need(arch.n_q, "n_q", arch) * dh * h +
                   need(arch.n_k, "n_k", arch) * dh * h + need(arch.n_v, "n_v", arch) * dh * h;
        }
        case AttentionKind::GTA: {
            const double dh = need(arch.d_h, "d_h", arch);
            const double dl = need(arch.d_l, "d_l", arch);
            return 2.0 * h * h + (need(arch.n_q, "n_q", arch) * dh +
                                  need(arch.n_k, "n_k", arch) * dh +
                                  need(arch.n_c, "n_c", arch) * dl + dl) *
                                     h;
        }
    }
    throw InvariantError("unhandled attention kind");
}

double ffn_macs_per_token(const ArchConfig& arch) {
    const double matmuls = arch.ffn_kind == FfnKind::Gated ? 3.0 : 2.0;
    return matmuls * static_cast<double>(arch.hidden_dim) * static_cast<double>(arch.ffn_dim);
}

CostBreakdown CostBreakdown::scaled(double factor) const {
    CostBreakdown c = *this;
    c.flops_attention *= factor;
    c.flops_linear *= factor;
    c.flops_ffn *= factor;
    c.flops_lm_head *= factor;
    c.bytes_weights *= factor;
    c.bytes_kv_read *= factor;
    c.bytes_kv_write *= factor;
    return c;
}

namespace {

double weight_bytes(const ArchConfig& arch, const Precision& weights, const CostOptions& options) {
    double params = static_cast<double>(arch.n_params);
    if (!options.embedding_weight_traffic) {
        params -= static_cast<double>(embedding_params(arch));
        if (params <= 0) {
            throw ConfigError(fmt::format(
                "{}: n_params {} does not exceed the embedding parameters {}", arch.name,
                arch.n_params, embedding_params(arch)));
        }
    }
    return params * weights.bytes_per_weight;
}

}  // namespace

CostBreakdown decode_step_cost(const ArchConfig& arch, std::int64_t n_context,
                               const Precision& weights, const Precision& kv,
                               const CostOptions& options) {
    if (n_context < 1) {
        throw DomainError(fmt::format(
            "decode step needs a context of at least one token, got N={}", n_context));
    }
    check_precision(weights, "weight precision");
    check_precision(kv, "kv precision");

    const double conv = convention_factor(options.convention);
    const double layers = static_cast<double>(arch.num_layers);
    const double n = static_cast<double>(n_context);

    CostBreakdown c;
    if (options.mode == CostMode::Approx) {
        c.flops_linear = conv * static_cast<double>(arch.n_params);
    } else {
        c.flops_attention = layers * attention_coefficient(arch) * n * conv;
        c.flops_linear = layers * linear_macs_per_token(arch) * conv;
        c.flops_ffn = layers * ffn_macs_per_token(arch) * conv;
        if (options.include_lm_head) {
            c.flops_lm_head =
                static_cast<double>(arch.hidden_dim) * static_cast<double>(arch.vocab_size) * conv;
        }
    }

    c.bytes_weights = weight_bytes(arch, weights, options);
    if (options.kv_read_traffic) {
        c.bytes_kv_read = layers * kv_cache_elements_per_layer(arch, n_context) * kv.bytes_per_weight;
    }
    if (options.kv_write_traffic) {
        c.bytes_kv_write = layers * kv_cache_elements_per_layer(arch, 1) * kv.bytes_per_weight;
    }
    return c;
}

CostBreakdown prefill_cost(const ArchConfig& arch, std::int64_t n_prompt,
                           const Precision& weights, const Precision& kv,
                           const CostOptions& options) {
    if (n_prompt < 1) {
        throw DomainError(fmt::format("prefill needs at least one prompt token, got {}", n_prompt));
    }
    check_precision(weights, "weight precision");
    check_precision(kv, "kv precision");

    const double conv = convention_factor(options.convention);
    const double layers = static_cast<double>(arch.num_layers);
    const double n = static_cast<double>(n_prompt);

    CostBreakdown c;
    if (options.mode == CostMode::Approx) {
        c.flops_linear = conv * static_cast<double>(arch.n_params) * n;
    } else {
        c.flops_attention = layers * attention_flops_sequence(arch, n_prompt, options.convention);
        c.flops_linear = layers * linear_macs_per_token(arch) * n * conv;
        c.flops_ffn = layers * ffn_macs_per_token(arch) * n * conv;
        // Logits are produced for the final prompt position only.
        if (options.include_lm_head) {
            c.flops_lm_head =
                static_cast<double>(arch.hidden_dim) * static_cast<double>(arch.vocab_size) * conv;
        }
    }
    c.bytes_weights = weight_bytes(arch, weights, options);
    if (options.kv_write_traffic) {
        c.bytes_kv_write = layers * kv_cache_elements_per_layer(arch, n_prompt) * kv.bytes_per_weight;
    }
    return c;
}

ArchConfig scale_layers(const ArchConfig& arch, std::int64_t new_layers) {
    if (new_layers < 1) {
        throw DomainError(fmt::format("layer count must be at least 1, got {}", new_layers));
    }
    if (arch.num_layers < 1) {
        throw ConfigError(fmt::format("{}: num_layers must be positive", arch.name));
    }
    if (new_layers == arch.num_layers) return arch;

    const std::int64_t embed = embedding_params(arch);
    const double per_layer =
        static_cast<double>(arch.n_params - embed) / static_cast<double>(arch.num_layers);
    ArchConfig out = arch;
    out.num_layers = new_layers;
    out.n_params = embed + static_cast<std::int64_t>(std::llround(per_layer)) * new_layers;
    if (out.n_params <= 0) {
        throw ConfigError(fmt::format("{}: rescaled parameter count is not positive", arch.name));
    }
    return out;
}

}  // namespace rooflinebench
