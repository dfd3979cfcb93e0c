#pragma once

// Streaming and FMA kernels used by the host probe. They are templates over
// the array and scalar types so tests can instantiate them with counting
// types and check the traffic/FLOP accounting against what actually runs.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace rooflinebench {

enum class StreamKernel { Copy, Scale, Add, Triad };

inline constexpr std::array<StreamKernel, 4> kStreamKernels = {
    StreamKernel::Copy, StreamKernel::Scale, StreamKernel::Add, StreamKernel::Triad};

constexpr const char* kernel_name(StreamKernel k) {
    switch (k) {
        case StreamKernel::Copy: return "copy";
        case StreamKernel::Scale: return "scale";
        case StreamKernel::Add: return "add";
        case StreamKernel::Triad: return "triad";
    }
    return "?";
}

// Bytes moved by one pass over n elements of elem_bytes each.
// copy/scale: one read + one write; add/triad: two reads + one write.
constexpr std::uint64_t stream_bytes(StreamKernel k, std::uint64_t n, std::uint64_t elem_bytes) {
    const std::uint64_t streams = (k == StreamKernel::Copy || k == StreamKernel::Scale) ? 2 : 3;
    return streams * n * elem_bytes;
}

template <class T>
class SpanArray {
public:
    using value_type = T;
    explicit SpanArray(std::span<T> data) : data_(data) {}
    T load(std::size_t i) const { return data_[i]; }
    void store(std::size_t i, T v) { data_[i] = v; }
    std::size_t size() const { return data_.size(); }

private:
    std::span<T> data_;
};

// One pass of a STREAM kernel over [begin, end):
//   copy:  c = a      scale: b = s * c
//   add:   c = a + b  triad: a = b + s * c
template <class Array>
void stream_pass(StreamKernel k, Array& a, Array& b, Array& c,
                 typename Array::value_type scalar, std::size_t begin, std::size_t end) {
    switch (k) {
        case StreamKernel::Copy:
            for (std::size_t i = begin; i < end; ++i) c.store(i, a.load(i));
            break;
        case StreamKernel::Scale:
            for (std::size_t i = begin; i < end; ++i) b.store(i, scalar * c.load(i));
            break;
        case StreamKernel::Add:
            for (std::size_t i = begin; i < end; ++i) c.store(i, a.load(i) + b.load(i));
            break;
        case StreamKernel::Triad:
            for (std::size_t i = begin; i < end; ++i) a.store(i, b.load(i) + scalar * c.load(i));
            break;
    }
}

template <class T>
inline T madd(T acc, T mul, T add) {
    return acc * mul + add;
}

// Independent multiply-add chains. Executes Chains * Unroll * iterations
// multiply-adds; the result is returned so the work cannot be elided.
template <class T, std::size_t Chains, std::size_t Unroll>
T fma_chains(std::uint64_t iterations, T mul, T add) {
    std::array<T, Chains> acc{};
    for (std::size_t k = 0; k < Chains; ++k) acc[k] = static_cast<T>(static_cast<int>(k % 7));
    for (std::uint64_t it = 0; it < iterations; ++it) {
        for (std::size_t u = 0; u < Unroll; ++u) {
            for (std::size_t k = 0; k < Chains; ++k) acc[k] = madd(acc[k], mul, add);
        }
    }
    T sum{};
    for (std::size_t k = 0; k < Chains; ++k) sum = sum + acc[k];
    return sum;
}

// FLOPs issued by fma_chains over `threads` threads: 2 * k * u * i * t.
constexpr std::uint64_t fma_flops(std::uint64_t chains, std::uint64_t unroll,
                                  std::uint64_t iterations, std::uint64_t threads) {
    return 2 * chains * unroll * iterations * threads;
}

}  // namespace rooflinebench
