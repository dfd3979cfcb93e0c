#include "rooflinebench/hwprobe.hpp"

#include <algorithm>
#include <barrier>
#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>
#include <mutex>
#include <new>
#include <thread>

#include <fmt/format.h>
#include <sys/utsname.h>
#include <unistd.h>

#include "rooflinebench/error.hpp"

namespace rooflinebench {
namespace {

using Clock = std::chrono::steady_clock;

std::mutex g_probe_mutex;

// Only one probe may own the machine at a time.
class ProbeLock {
public:
    ProbeLock() : lock_(g_probe_mutex, std::try_to_lock) {
        if (!lock_.owns_lock()) throw ProbeError("another probe is already running");
    }

private:
    std::unique_lock<std::mutex> lock_;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Runs body(thread_index) on `threads` threads and returns wall seconds
// from a common start barrier to the last join.
template <class Body>
double timed_parallel(unsigned threads, Body&& body) {
    std::barrier start(static_cast<std::ptrdiff_t>(threads) + 1);
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            start.arrive_and_wait();
            body(t);
        });
    }
    start.arrive_and_wait();
    const auto t0 = Clock::now();
    for (auto& th : pool) th.join();
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t available_memory_bytes() {
    const long pages = sysconf(_SC_AVPHYS_PAGES);
    const long page = sysconf(_SC_PAGESIZE);
    if (pages <= 0 || page <= 0) return 0;
    return static_cast<std::size_t>(pages) * static_cast<std::size_t>(page);
}

std::vector<std::string> host_environment(unsigned threads) {
    std::vector<std::string> env;
    utsname u{};
    if (uname(&u) == 0) env.push_back(fmt::format("os: {} {} {}", u.sysname, u.release, u.machine));
    std::ifstream cpuinfo("/proc/cpuinfo");
    for (std::string line; std::getline(cpuinfo, line);) {
        if (line.rfind("model name", 0) == 0) {
            auto pos = line.find(':');
            if (pos != std::string::npos) env.push_back("cpu:" + line.substr(pos + 1));
            break;
        }
    }
    env.push_back(fmt::format("hardware_threads: {}", std::thread::hardware_concurrency()));
    env.push_back(fmt::format("probe_threads: {}", threads));
#if defined(__clang__)
    env.push_back(fmt::format("compiler: clang {}", __clang_version__));
#elif defined(__GNUC__)
    env.push_back(fmt::format("compiler: gcc {}", __VERSION__));
#endif
    return env;
}

struct StreamBuffers {
    std::unique_ptr<double[]> a, b, c;
    std::size_t elements = 0;
};

// Allocates three arrays of `bytes` each, halving on failure. Returns an
// empty set when even the cache floor cannot be allocated.
StreamBuffers allocate_buffers(std::size_t bytes, std::vector<std::string>& notes) {
    const std::size_t avail = available_memory_bytes();
    std::size_t want = bytes;
    if (avail > 0 && 3 * want > avail / 10 * 6) {
        std::size_t capped = want;
        while (capped > kMinProbeBufferBytes && 3 * capped > avail / 10 * 6) capped /= 2;
        notes.push_back(fmt::format("buffer {} MiB exceeds free memory budget; using {} MiB",
                                    want / kMiB, capped / kMiB));
        want = capped;
    }
    while (want >= kMinProbeBufferBytes) {
        StreamBuffers buf;
        buf.elements = want / sizeof(double);
        buf.a.reset(new (std::nothrow) double[buf.elements]);
        buf.b.reset(new (std::nothrow) double[buf.elements]);
        buf.c.reset(new (std::nothrow) double[buf.elements]);
        if (buf.a && buf.b && buf.c) {
            if (want != bytes && notes.empty()) {
                notes.push_back(fmt::format("buffer {} MiB downgraded to {} MiB", bytes / kMiB,
                                            want / kMiB));
            }
            return buf;
        }
        notes.push_back(fmt::format("allocation of 3 x {} MiB failed; halving", want / kMiB));
        want /= 2;
    }
    return {};
}

std::string iso8601_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

void validate(const ProbeConfig& config) {
    if (config.repetitions < 1) {
        throw ProbeError(fmt::format("repetitions must be at least 1, got {}", config.repetitions));
    }
    if (config.warmup < 0) {
        throw ProbeError(fmt::format("warmup must be non-negative, got {}", config.warmup));
    }
    if (config.buffer_bytes.empty()) throw ProbeError("at least one buffer size is required");
    for (auto b : config.buffer_bytes) {
        if (b < kMinProbeBufferBytes) {
            throw ProbeError(fmt::format(
                "buffer size {} bytes is below the {} MiB cache floor", b, kMinProbeBufferBytes / kMiB));
        }
    }
    if (config.flops_precision != ComputeKind::FP32 && config.flops_precision != ComputeKind::FP64) {
        throw ProbeError(fmt::format("host flops probe supports fp32 and fp64, not {}",
                                     to_string(config.flops_precision)));
    }
    if (!(config.min_trial_seconds > 0.0)) throw ProbeError("min_trial_seconds must be positive");
}

unsigned resolve_threads(const ProbeConfig& config) {
    if (config.threads > 0) return config.threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

double timer_resolution_seconds() {
    static const double resolution = [] {
        auto best = Clock::duration::max();
        for (int i = 0; i < 1000; ++i) {
            const auto t0 = Clock::now();
            auto t1 = Clock::now();
            while (t1 == t0) t1 = Clock::now();
            best = std::min(best, t1 - t0);
        }
        return std::chrono::duration<double>(best).count();
    }();
    return resolution;
}

void ProbeResult::merge(const ProbeResult& other) {
    if (other.bandwidth_gbps) {
        bandwidth_gbps = bandwidth_gbps ? std::max(*bandwidth_gbps, *other.bandwidth_gbps)
                                        : *other.bandwidth_gbps;
    }
    for (const auto& [k, v] : other.flops_gflops) {
        auto [it, inserted] = flops_gflops.emplace(k, v);
        if (!inserted) it->second = std::max(it->second, v);
    }
    per_trial.insert(per_trial.end(), other.per_trial.begin(), other.per_trial.end());
    if (environment.empty()) environment = other.environment;
    notes.insert(notes.end(), other.notes.begin(), other.notes.end());
}

ProbeResult measure_bandwidth(const ProbeConfig& config) {
    validate(config);
    ProbeLock lock;
    const unsigned threads = resolve_threads(config);
    const double min_seconds = std::max(config.min_trial_seconds, 50.0 * timer_resolution_seconds());

    ProbeResult result;
    result.environment = host_environment(threads);

    for (std::size_t requested : config.buffer_bytes) {
        StreamBuffers buf = allocate_buffers(requested, result.notes);
        if (!buf.a) {
            throw ProbeError(fmt::format("cannot allocate 3 x {} MiB stream buffers", requested / kMiB));
        }
        const std::size_t n = buf.elements;
        const std::size_t bytes = n * sizeof(double);
        auto chunk = [&](unsigned t) {
            const std::size_t per = (n + threads - 1) / threads;
            return std::pair{std::min(n, t * per), std::min(n, (t + 1) * per)};
        };
        // First touch from the worker threads places pages near them.
        timed_parallel(threads, [&](unsigned t) {
            auto [lo, hi] = chunk(t);
            for (std::size_t i = lo; i < hi; ++i) {
                buf.a[i] = 1.0;
                buf.b[i] = 2.0;
                buf.c[i] = 0.0;
            }
        });
        SpanArray<double> a({buf.a.get(), n}), b({buf.b.get(), n}), c({buf.c.get(), n});

        for (StreamKernel k : kStreamKernels) {
            int passes = 1;
            auto run = [&] {
                return timed_parallel(threads, [&](unsigned t) {
                    auto [lo, hi] = chunk(t);
                    for (int p = 0; p < passes; ++p) stream_pass(k, a, b, c, 3.0, lo, hi);
                });
            };
            // Lengthen the trial until it spans enough timer ticks.
            double secs = run();
            while (secs < min_seconds && passes < (1 << 20)) {
                passes *= 2;
                secs = run();
            }
            for (int w = 0; w < config.warmup; ++w) run();

            std::vector<double> rates;
            for (int r = 0; r < config.repetitions; ++r) {
                secs = run();
                const std::uint64_t moved =
                    stream_bytes(k, n, sizeof(double)) * static_cast<std::uint64_t>(passes);
                const double rate = static_cast<double>(moved) / secs / 1e9;
                rates.push_back(rate);
                result.per_trial.push_back({kernel_name(k), bytes, threads, moved, secs, rate});
            }
            const double med = median(rates);
            result.bandwidth_gbps = std::max(result.bandwidth_gbps.value_or(0.0), med);
        }
    }
    return result;
}

namespace {

template <class T, std::size_t Chains, std::size_t Unroll>
Trial fma_trial(unsigned threads, std::uint64_t iterations, std::vector<T>& sink) {
    const T mul = static_cast<T>(0.999999);
    const T add = static_cast<T>(1e-6);
    const double secs = timed_parallel(threads, [&](unsigned t) {
        sink[t] = fma_chains<T, Chains, Unroll>(iterations, mul, add);
    });
    Trial trial;
    trial.kernel = fmt::format("fma_{}x{}", Chains, Unroll);
    trial.threads = threads;
    trial.work = fma_flops(Chains, Unroll, iterations, threads);
    trial.seconds = secs;
    trial.rate = static_cast<double>(trial.work) / secs / 1e9;
    return trial;
}

template <class T, std::size_t Chains, std::size_t Unroll>
std::vector<Trial> fma_series(const ProbeConfig& config, unsigned threads, double min_seconds) {
    std::vector<T> sink(threads);
    std::uint64_t iterations = 1024;
    Trial t = fma_trial<T, Chains, Unroll>(threads, iterations, sink);
    while (t.seconds < min_seconds && iterations < (std::uint64_t{1} << 40)) {
        iterations *= 2;
        t = fma_trial<T, Chains, Unroll>(threads, iterations, sink);
    }
    for (int w = 0; w < config.warmup; ++w) fma_trial<T, Chains, Unroll>(threads, iterations, sink);
    std::vector<Trial> trials;
    for (int r = 0; r < config.repetitions; ++r) {
        trials.push_back(fma_trial<T, Chains, Unroll>(threads, iterations, sink));
    }
    volatile T keep = sink[0];
    (void)keep;
    return trials;
}

}  // namespace

ProbeResult measure_flops(const ProbeConfig& config) {
    validate(config);
    ProbeLock lock;
    const unsigned threads = resolve_threads(config);
    const double min_seconds = std::max(config.min_trial_seconds, 50.0 * timer_resolution_seconds());

    ProbeResult result;
    result.environment = host_environment(threads);

    std::vector<Trial> trials;
    const bool fp64 = config.flops_precision == ComputeKind::FP64;
    const bool full = config.chains == ChainWidth::Full;
    if (fp64) {
        trials = full ? fma_series<double, 32, 4>(config, threads, min_seconds)
                      : fma_series<double, 1, 1>(config, threads, min_seconds);
    } else {
        trials = full ? fma_series<float, 64, 4>(config, threads, min_seconds)
                      : fma_series<float, 1, 1>(config, threads, min_seconds);
    }
    std::vector<double> rates;
    for (auto& t : trials) {
        t.kernel = fmt::format("{}_{}", to_string(config.flops_precision), t.kernel);
        rates.push_back(t.rate);
    }
    result.flops_gflops[config.flops_precision] = median(rates);
    result.per_trial = std::move(trials);
    return result;
}

std::vector<std::string> size_monotonicity_notes(const ProbeResult& result, double slack) {
    // Best per-kernel median for each buffer size, in ascending size order.
    std::map<std::size_t, std::map<std::string, std::vector<double>>> by_size;
    for (const auto& t : result.per_trial) {
        if (t.buffer_bytes > 0) by_size[t.buffer_bytes][t.kernel].push_back(t.rate);
    }
    std::vector<std::string> notes;
    std::optional<std::pair<std::size_t, double>> prev;
    for (const auto& [size, kernels] : by_size) {
        double best = 0.0;
        for (const auto& [_, rates] : kernels) best = std::max(best, median(rates));
        if (prev && best > prev->second * (1.0 + slack)) {
            notes.push_back(fmt::format(
                "bandwidth rose from {:.2f} GB/s at {} MiB to {:.2f} GB/s at {} MiB (>{:.0f}% slack)",
                prev->second, prev->first / kMiB, best, size / kMiB, slack * 100));
        }
        prev = {size, best};
    }
    return notes;
}

HardwareProfile emit_profile(const ProbeResult& results,
                             const std::optional<HardwareProfile>& declared,
                             const std::string& name) {
    if (!results.bandwidth_gbps && results.flops_gflops.empty()) {
        throw ProbeError("no measurements to emit");
    }
    HardwareProfile p;
    p.name = name;
    if (declared) {
        p.name = declared->name.empty() ? name : declared->name;
        p.architecture_class = declared->architecture_class;
        p.bandwidth_gbps.theoretical = declared->bandwidth_gbps.theoretical;
        for (const auto& [kind, pair] : declared->peak_gflops) {
            if (pair.theoretical) p.peak_gflops[kind].theoretical = pair.theoretical;
        }
    }
    p.bandwidth_gbps.measured = results.bandwidth_gbps;
    for (const auto& [kind, value] : results.flops_gflops) p.peak_gflops[kind].measured = value;
    p.source = "host probe (stream copy/scale/add/triad, fma chains)";
    p.timestamp = iso8601_now();
    if (!p.bandwidth_gbps.theoretical && !p.bandwidth_gbps.measured) {
        throw ProbeError("bandwidth was neither measured nor declared");
    }
    validate(p);
    return p;
}

std::vector<std::string> sanity_notes(const HardwareProfile& profile) {
    std::vector<std::string> notes;
    auto check = [&](const std::string& what, const BasisPair& pair, const char* unit) {
        if (!pair.theoretical || !pair.measured) return;
        const bool ok = *pair.measured <= *pair.theoretical;
        notes.push_back(fmt::format("{} {}: measured {:.2f} {} {} theoretical {:.2f} {}",
                                    ok ? "PASS" : "FAIL", what, *pair.measured, unit,
                                    ok ? "<=" : ">", *pair.theoretical, unit));
    };
    check("bandwidth", profile.bandwidth_gbps, "GB/s");
    for (const auto& [kind, pair] : profile.peak_gflops) {
        check(fmt::format("{} peak", to_string(kind)), pair, "GFLOPS");
    }
    return notes;
}

}  // namespace rooflinebench
