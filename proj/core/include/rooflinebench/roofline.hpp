#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rooflinebench/arch.hpp"
#include "rooflinebench/precision.hpp"

namespace rooflinebench {

enum class Basis { Theoretical, Measured };
enum class Regime { MemoryBound, ComputeBound };
enum class Provenance { Measured, Predicted };
enum class PhiSpace { Raw, Log10 };
enum class ArchitectureClass { DiscreteGPU, UnifiedSoC, EdgeAIModule, GeneralCPU };

// Arithmetic precision of a compute ceiling. Distinct from storage
// Precision: a Q8_0 model still runs its matmuls on fp16/fp32 units.
enum class ComputeKind { FP64, FP32, FP16, BF16, INT8 };

std::string_view to_string(Basis basis);
std::string_view to_string(Regime regime);
std::string_view to_string(Provenance provenance);
std::string_view to_string(PhiSpace space);
std::string_view to_string(ArchitectureClass cls);
std::string_view to_string(ComputeKind kind);  // lower-case JSON key, e.g. "fp16"
Basis parse_basis(std::string_view text);
PhiSpace parse_phi_space(std::string_view text);
ArchitectureClass parse_architecture_class(std::string_view text);
ComputeKind parse_compute_kind(std::string_view text);

// A quantity declared under the two bases. Either side may be absent.
struct BasisPair {
    std::optional<double> theoretical;
    std::optional<double> measured;

    std::optional<double> get(Basis b) const {
        return b == Basis::Theoretical ? theoretical : measured;
    }
    friend bool operator==(const BasisPair&, const BasisPair&) = default;
};

// Ceiling capabilities of one device. Bandwidth in GB/s, peaks in GFLOPS
// (decimal units, 1e9).
struct HardwareProfile {
    std::string name;
    ArchitectureClass architecture_class = ArchitectureClass::GeneralCPU;
    BasisPair bandwidth_gbps;
    std::map<ComputeKind, BasisPair> peak_gflops;
    std::string source;
    std::string timestamp;

    friend bool operator==(const HardwareProfile&, const HardwareProfile&) = default;
};

// Throws SchemaError when a present value is non-positive, a declared
// precision has neither basis, or bandwidth has neither basis.
void validate(const HardwareProfile& profile);

struct RidgePoint {
    double oi = 0.0;              // FLOPs/Byte
    double peak_gflops = 0.0;     // pi
    double bandwidth_gbps = 0.0;
    Basis basis = Basis::Theoretical;
    ComputeKind precision = ComputeKind::FP32;

    friend bool operator==(const RidgePoint&, const RidgePoint&) = default;
};

struct RooflinePoint {
    double oi = 0.0;           // FLOPs/Byte
    double perf_gflops = 0.0;
    std::optional<Regime> regime;
    std::string label;
    std::string scenario;
    Provenance provenance = Provenance::Measured;

    friend bool operator==(const RooflinePoint&, const RooflinePoint&) = default;
};

struct PhiResult {
    double value = 0.0;
    Regime regime = Regime::MemoryBound;
    PhiSpace space = PhiSpace::Raw;
    RidgePoint ridge;
    // Set when the point sits above pi; value is clamped to 0.
    bool above_ceiling = false;

    // Same regime and same ridge. Symmetric by construction.
    bool comparable_with(const PhiResult& other) const {
        return regime == other.regime && ridge == other.ridge && space == other.space;
    }
};

struct PredictedTiming {
    double t_comp_s = 0.0;
    double t_mem_s = 0.0;
    double bound_tps = 0.0;
    double implied_oi = 0.0;
    Regime regime = Regime::MemoryBound;
};

// Throws CapabilityError when the profile lacks the peak or bandwidth.
RidgePoint ridge(const HardwareProfile& profile, ComputeKind precision, Basis basis);

double peak_gflops(const HardwareProfile& profile, ComputeKind precision, Basis basis);
double bandwidth_gbps(const HardwareProfile& profile, Basis basis);

// min(peak, oi * bandwidth) in GFLOPS.
double attainable(const HardwareProfile& profile, double oi, ComputeKind precision, Basis basis);
double attainable(const RidgePoint& ridge, double oi);

// MemoryBound iff oi < ridge.oi; the ridge itself counts as ComputeBound.
Regime classify(double oi, const RidgePoint& ridge);

// Relative inference potential: Euclidean distance to the ridge in the
// memory-bound regime, vertical distance to pi in the compute-bound regime.
// Points above pi clamp to 0 and set above_ceiling.
PhiResult phi(const RooflinePoint& point, const RidgePoint& ridge, PhiSpace space);

// Bandwidth/compute timing bound for one decode token, using 2 * n_params
// FLOPs and n_params * bytes_per_weight bytes.
PredictedTiming predict_decode(double n_params, const Precision& precision,
                               const HardwareProfile& profile, ComputeKind ceiling, Basis basis);

// Performance = W / latency, OI = W / Q. Regime is left unset; classify
// against a ridge with classified().
RooflinePoint to_point(const CostBreakdown& cost, double latency_s, std::string label = {},
                       Provenance provenance = Provenance::Measured);

RooflinePoint classified(RooflinePoint point, const RidgePoint& ridge);

struct Vertex {
    double oi = 0.0;
    double perf_gflops = 0.0;
};

// Outline of the headroom between a point and the roof: for memory-bound
// points the triangle point -> roof above the point -> ridge; for
// compute-bound points the segment from the point up to pi.
std::vector<Vertex> potential_region(const RooflinePoint& point, const RidgePoint& ridge);

}  // namespace rooflinebench
