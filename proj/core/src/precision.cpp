#include "rooflinebench/precision.hpp"

#include <charconv>
#include <string>

#include <fmt/format.h>

#include "rooflinebench/error.hpp"
#include "text_util.hpp"

namespace rooflinebench {

Precision Precision::custom(double bytes) {
    if (!(bytes > 0.0 && bytes <= 8.0)) {
        throw ConfigError(fmt::format(
            "bytes_per_weight: custom precision needs a value in (0, 8], got {}", bytes));
    }
    return {PrecisionKind::Custom, bytes};
}

Precision Precision::of(PrecisionKind kind) {
    switch (kind) {
        case PrecisionKind::FP32: return fp32();
        case PrecisionKind::FP16: return fp16();
        case PrecisionKind::Q8_0: return q8_0();
        case PrecisionKind::Q4_K_M: return q4_k_m();
        case PrecisionKind::Custom: break;
    }
    throw ConfigError("bytes_per_weight: custom precision requires an explicit byte cost");
}

std::string_view to_string(PrecisionKind kind) {
    switch (kind) {
        case PrecisionKind::FP32: return "FP32";
        case PrecisionKind::FP16: return "FP16";
        case PrecisionKind::Q8_0: return "Q8_0";
        case PrecisionKind::Q4_K_M: return "Q4_K_M";
        case PrecisionKind::Custom: return "custom";
    }
    return "?";
}

Precision parse_precision(std::string_view text) {
    const std::string t = detail::lower(detail::trim(text));
    if (t == "fp32" || t == "f32") return Precision::fp32();
    if (t == "fp16" || t == "f16") return Precision::fp16();
    if (t == "q8_0") return Precision::q8_0();
    if (t == "q4_k_m") return Precision::q4_k_m();
    if (t.rfind("custom:", 0) == 0) {
        const std::string num = t.substr(7);
        double bytes = 0.0;
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), bytes);
        if (ec != std::errc() || ptr != num.data() + num.size()) {
            throw ConfigError(fmt::format("precision: cannot parse byte cost '{}'", num));
        }
        return Precision::custom(bytes);
    }
    throw ConfigError(fmt::format(
        "precision: unknown value '{}' (expected fp32, fp16, q8_0, q4_k_m or custom:<bytes>)",
        text));
}

const std::vector<std::string>& known_quant_labels() {
    static const std::vector<std::string> labels = {"F32", "F16", "Q8_0", "Q4_K_M"};
    return labels;
}

std::optional<Precision> precision_from_quant_label(std::string_view label) {
    const std::string u = detail::upper(detail::trim(label));
    if (u == "F32" || u == "FP32") return Precision::fp32();
    if (u == "F16" || u == "FP16") return Precision::fp16();
    if (u == "Q8_0") return Precision::q8_0();
    if (u == "Q4_K_M") return Precision::q4_k_m();
    return std::nullopt;
}

}  // namespace rooflinebench
