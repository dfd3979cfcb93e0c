#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rooflinebench {

enum class PrecisionKind { FP32, FP16, Q8_0, Q4_K_M, Custom };

// Storage precision of weights or KV-cache entries.
//
// Byte costs of the quantized formats follow the GGUF block layouts:
// Q8_0 packs 32 weights plus an fp16 scale into 34 bytes, Q4_K_M averages
// 4.5 bits per weight.
struct Precision {
    PrecisionKind kind = PrecisionKind::FP16;
    double bytes_per_weight = 2.0;

    static Precision fp32() { return {PrecisionKind::FP32, 4.0}; }
    static Precision fp16() { return {PrecisionKind::FP16, 2.0}; }
    static Precision q8_0() { return {PrecisionKind::Q8_0, 1.0625}; }
    static Precision q4_k_m() { return {PrecisionKind::Q4_K_M, 0.5625}; }
    // Throws ConfigError unless bytes lies in (0, 8].
    static Precision custom(double bytes);
    static Precision of(PrecisionKind kind);

    friend bool operator==(const Precision&, const Precision&) = default;
};

std::string_view to_string(PrecisionKind kind);

// Accepts "fp32", "fp16", "q8_0", "q4_k_m" (case-insensitive) or a
// "custom:<bytes>" literal.
Precision parse_precision(std::string_view text);

// Maps a llama-bench / GGUF type label (F16, Q8_0, Q4_K_M, F32) onto a
// Precision. Returns nullopt for labels that are not recognised; callers
// never guess.
std::optional<Precision> precision_from_quant_label(std::string_view label);

// Labels accepted by precision_from_quant_label, for error messages.
const std::vector<std::string>& known_quant_labels();

}  // namespace rooflinebench
