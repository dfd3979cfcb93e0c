#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rooflinebench/probe_kernels.hpp"
#include "rooflinebench/roofline.hpp"

namespace rooflinebench {

inline constexpr std::size_t kMiB = std::size_t{1} << 20;
inline constexpr std::size_t kGiB = std::size_t{1} << 30;

// Buffers below this are likely to be served from the last-level cache.
inline constexpr std::size_t kMinProbeBufferBytes = 64 * kMiB;

enum class ChainWidth { Full, Single };

struct ProbeConfig {
    // Size of each of the three stream arrays.
    std::vector<std::size_t> buffer_bytes = {64 * kMiB, 256 * kMiB, 1 * kGiB};
    int repetitions = 10;
    int warmup = 3;
    unsigned threads = 0;  // 0 = all hardware threads
    ComputeKind flops_precision = ComputeKind::FP32;
    ChainWidth chains = ChainWidth::Full;
    double min_trial_seconds = 0.05;
};

// Throws ProbeError for zero repetitions, buffers below the cache floor or
// an unsupported flops precision (only fp32 and fp64 run on the host).
void validate(const ProbeConfig& config);

unsigned resolve_threads(const ProbeConfig& config);

struct Trial {
    std::string kernel;
    std::size_t buffer_bytes = 0;  // 0 for compute trials
    unsigned threads = 0;
    std::uint64_t work = 0;  // bytes or FLOPs moved/issued in the trial
    double seconds = 0.0;
    double rate = 0.0;  // GB/s or GFLOPS
};

struct ProbeResult {
    std::optional<double> bandwidth_gbps;
    std::map<ComputeKind, double> flops_gflops;
    std::vector<Trial> per_trial;
    std::vector<std::string> environment;
    std::vector<std::string> notes;

    void merge(const ProbeResult& other);
};

// STREAM copy/scale/add/triad over every buffer size. Reports the maximum
// of the per-(kernel, size) medians. Buffers that cannot be allocated are
// shrunk and the downgrade is noted.
ProbeResult measure_bandwidth(const ProbeConfig& config);

// FMA-chain peak for config.flops_precision over the configured threads.
ProbeResult measure_flops(const ProbeConfig& config);

// Soft check that bandwidth does not grow with buffer size. Returns a note
// for every size whose best median exceeds the previous size's by more
// than `slack`.
std::vector<std::string> size_monotonicity_notes(const ProbeResult& result, double slack = 0.20);

// Builds a profile from probe results. Theoretical values, architecture
// class and name come from `declared` when given.
HardwareProfile emit_profile(const ProbeResult& results,
                             const std::optional<HardwareProfile>& declared,
                             const std::string& name = "host");

// PASS/FAIL lines comparing every measured value to its theoretical twin.
std::vector<std::string> sanity_notes(const HardwareProfile& profile);

// Estimated steady_clock resolution in seconds.
double timer_resolution_seconds();

}  // namespace rooflinebench
