#include "rooflinebench/roofline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "rooflinebench/error.hpp"
#include "text_util.hpp"

namespace rooflinebench {

std::string_view to_string(Basis basis) {
    return basis == Basis::Theoretical ? "theoretical" : "measured";
}

std::string_view to_string(Regime regime) {
    return regime == Regime::MemoryBound ? "MemoryBound" : "ComputeBound";
}

std::string_view to_string(Provenance provenance) {
    return provenance == Provenance::Measured ? "measured" : "predicted";
}

std::string_view to_string(PhiSpace space) {
    return space == PhiSpace::Raw ? "raw" : "log10";
}

std::string_view to_string(ArchitectureClass cls) {
    switch (cls) {
        case ArchitectureClass::DiscreteGPU: return "DiscreteGPU";
        case ArchitectureClass::UnifiedSoC: return "UnifiedSoC";
        case ArchitectureClass::EdgeAIModule: return "EdgeAIModule";
        case ArchitectureClass::GeneralCPU: return "GeneralCPU";
    }
    return "?";
}

std::string_view to_string(ComputeKind kind) {
    switch (kind) {
        case ComputeKind::FP64: return "fp64";
        case ComputeKind::FP32: return "fp32";
        case ComputeKind::FP16: return "fp16";
        case ComputeKind::BF16: return "bf16";
        case ComputeKind::INT8: return "int8";
    }
    return "?";
}

Basis parse_basis(std::string_view text) {
    const std::string l = detail::lower(detail::trim(text));
    if (l == "theoretical" || l == "theo") return Basis::Theoretical;
    if (l == "measured" || l == "meas") return Basis::Measured;
    throw ConfigError(
        fmt::format("basis: unknown value '{}' (expected theoretical or measured)", text));
}

PhiSpace parse_phi_space(std::string_view text) {
    const std::string l = detail::lower(detail::trim(text));
    if (l == "raw") return PhiSpace::Raw;
    if (l == "log10") return PhiSpace::Log10;
    throw ConfigError(fmt::format("phi_space: unknown value '{}' (expected raw or log10)", text));
}

ArchitectureClass parse_architecture_class(std::string_view text) {
    for (auto c : {ArchitectureClass::DiscreteGPU, ArchitectureClass::UnifiedSoC,
                   ArchitectureClass::EdgeAIModule, ArchitectureClass::GeneralCPU}) {
        if (text == to_string(c)) return c;
    }
    throw SchemaError(fmt::format(
        "architecture_class: unknown value '{}' (expected DiscreteGPU, UnifiedSoC, "
        "EdgeAIModule or GeneralCPU)",
        text));
}

ComputeKind parse_compute_kind(std::string_view text) {
    const std::string l = detail::lower(detail::trim(text));
    for (auto k : {ComputeKind::FP64, ComputeKind::FP32, ComputeKind::FP16, ComputeKind::BF16,
                   ComputeKind::INT8}) {
        if (l == to_string(k)) return k;
    }
    throw ConfigError(fmt::format(
        "compute precision: unknown value '{}' (expected fp64, fp32, fp16, bf16 or int8)", text));
}

void validate(const HardwareProfile& profile) {
    auto check = [&](const std::optional<double>& v, const std::string& what) {
        if (v && !(*v > 0.0 && std::isfinite(*v))) {
            throw SchemaError(fmt::format("{}: {} must be a positive number, got {}",
                                          profile.name, what, *v));
        }
    };
    if (profile.name.empty()) throw SchemaError("name: profile name must not be empty");
    if (!profile.bandwidth_gbps.theoretical && !profile.bandwidth_gbps.measured) {
        throw SchemaError(fmt::format("{}: bandwidth_gbps needs a theoretical or measured value",
                                      profile.name));
    }
    check(profile.bandwidth_gbps.theoretical, "bandwidth_gbps.theoretical");
    check(profile.bandwidth_gbps.measured, "bandwidth_gbps.measured");
    for (const auto& [kind, pair] : profile.peak_gflops) {
        const std::string key = fmt::format("peak_gflops.{}", to_string(kind));
        if (!pair.theoretical && !pair.measured) {
            throw SchemaError(fmt::format("{}: {} needs a theoretical or measured value",
                                          profile.name, key));
        }
        check(pair.theoretical, key + ".theoretical");
        check(pair.measured, key + ".measured");
    }
}

double bandwidth_gbps(const HardwareProfile& profile, Basis basis) {
    auto bw = profile.bandwidth_gbps.get(basis);
    if (!bw) {
        throw CapabilityError(fmt::format("capability not profiled: {} has no {} bandwidth",
                                          profile.name, to_string(basis)));
    }
    return *bw;
}

double peak_gflops(const HardwareProfile& profile, ComputeKind precision, Basis basis) {
    auto it = profile.peak_gflops.find(precision);
    std::optional<double> peak;
    if (it != profile.peak_gflops.end()) peak = it->second.get(basis);
    if (!peak) {
        throw CapabilityError(fmt::format("capability not profiled: {} has no {} {} peak",
                                          profile.name, to_string(basis), to_string(precision)));
    }
    return *peak;
}

RidgePoint ridge(const HardwareProfile& profile, ComputeKind precision, Basis basis) {
    RidgePoint r;
    r.peak_gflops = peak_gflops(profile, precision, basis);
    r.bandwidth_gbps = bandwidth_gbps(profile, basis);
    r.oi = r.peak_gflops / r.bandwidth_gbps;
    r.basis = basis;
    r.precision = precision;
    return r;
}

double attainable(const RidgePoint& ridge, double oi) {
    if (!(oi > 0.0)) throw DomainError(fmt::format("operational intensity must be positive, got {}", oi));
    return std::min(ridge.peak_gflops, oi * ridge.bandwidth_gbps);
}

double attainable(const HardwareProfile& profile, double oi, ComputeKind precision, Basis basis) {
    return attainable(ridge(profile, precision, basis), oi);
}

Regime classify(double oi, const RidgePoint& ridge) {
    return oi < ridge.oi ? Regime::MemoryBound : Regime::ComputeBound;
}

PhiResult phi(const RooflinePoint& point, const RidgePoint& ridge, PhiSpace space) {
    if (!(point.oi > 0.0) || !(point.perf_gflops > 0.0)) {
        throw DomainError(fmt::format("point '{}' needs positive coordinates (oi={}, perf={})",
                                      point.label, point.oi, point.perf_gflops));
    }
    PhiResult r;
    r.regime = classify(point.oi, ridge);
    r.space = space;
    r.ridge = ridge;
    if (point.perf_gflops > ridge.peak_gflops) {
        r.above_ceiling = true;
        r.value = 0.0;
        return r;
    }

    const bool log = space == PhiSpace::Log10;
    const double x_p = log ? std::log10(point.oi) : point.oi;
    const double y_p = log ? std::log10(point.perf_gflops) : point.perf_gflops;
    const double x_r = log ? std::log10(ridge.oi) : ridge.oi;
    const double y_r = log ? std::log10(ridge.peak_gflops) : ridge.peak_gflops;

    if (r.regime == Regime::MemoryBound) {
        r.value = std::hypot(x_r - x_p, y_r - y_p);
    } else {
        r.value = y_r - y_p;
    }
    return r;
}

PredictedTiming predict_decode(double n_params, const Precision& precision,
                               const HardwareProfile& profile, ComputeKind ceiling, Basis basis) {
    if (!(n_params > 0.0)) {
        throw DomainError(fmt::format("parameter count must be positive, got {}", n_params));
    }
    if (!(precision.bytes_per_weight > 0.0)) {
        throw ConfigError("precision: bytes per weight must be positive");
    }
    const RidgePoint r = ridge(profile, ceiling, basis);
    PredictedTiming t;
    t.t_comp_s = 2.0 * n_params / (r.peak_gflops * 1e9);
    t.t_mem_s = n_params * precision.bytes_per_weight / (r.bandwidth_gbps * 1e9);
    t.bound_tps = 1.0 / std::max(t.t_comp_s, t.t_mem_s);
    t.implied_oi = 2.0 / precision.bytes_per_weight;
    t.regime = t.t_mem_s > t.t_comp_s ? Regime::MemoryBound : Regime::ComputeBound;
    return t;
}

RooflinePoint to_point(const CostBreakdown& cost, double latency_s, std::string label,
                       Provenance provenance) {
    if (!(latency_s > 0.0)) {
        throw DomainError(fmt::format("latency must be positive, got {} s", latency_s));
    }
    const double q = cost.total_bytes();
    if (!(q > 0.0)) throw DomainError("degenerate cost: memory traffic Q is zero");
    const double w = cost.total_flops();
    RooflinePoint p;
    p.oi = w / q;
    p.perf_gflops = w / latency_s / 1e9;
    p.label = std::move(label);
    p.provenance = provenance;
    return p;
}

RooflinePoint classified(RooflinePoint point, const RidgePoint& ridge) {
    point.regime = classify(point.oi, ridge);
    return point;
}

std::vector<Vertex> potential_region(const RooflinePoint& point, const RidgePoint& ridge) {
    if (classify(point.oi, ridge) == Regime::MemoryBound) {
        return {{point.oi, point.perf_gflops},
                {point.oi, point.oi * ridge.bandwidth_gbps},
                {ridge.oi, ridge.peak_gflops}};
    }
    return {{point.oi, point.perf_gflops}, {point.oi, ridge.peak_gflops}};
}

}  // namespace rooflinebench
