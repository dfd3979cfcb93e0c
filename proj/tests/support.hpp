#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "rooflinebench/arch.hpp"
#include "rooflinebench/profile_io.hpp"
#include "rooflinebench/roofline.hpp"

namespace testing_support {

inline std::filesystem::path data_dir() { return ROOFLINEBENCH_TEST_DATA_DIR; }
inline std::filesystem::path fixture(const std::string& name) { return data_dir() / "fixtures" / name; }

inline rooflinebench::HardwareProfile catalog_device(const std::string& name) {
    return rooflinebench::load_profile(data_dir() / "hardware_catalog.json", name);
}

// Small, valid configurations for every attention variant. Dimensions stay
// tiny so the counting oracles run in microseconds.
inline rooflinebench::ArchConfig random_arch(std::mt19937_64& rng, rooflinebench::AttentionKind kind) {
    using namespace rooflinebench;
    auto pick = [&rng](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };
    ArchConfig a;
    a.name = "tiny";
    a.attention = kind;
    a.num_layers = pick(1, 4);
    a.vocab_size = pick(4, 32);
    a.ffn_kind = pick(0, 1) ? FfnKind::Gated : FfnKind::Plain;
    const std::int64_t nq = pick(1, 4);
    const std::int64_t dh = pick(1, 4);
    a.n_q = nq;
    a.d_h = dh;
    switch (kind) {
        case AttentionKind::MHA:
            a.hidden_dim = nq * dh;
            break;
        case AttentionKind::GQA: {
            a.hidden_dim = nq * dh;
            std::int64_t nk = pick(1, nq);
            while (nq % nk != 0) --nk;
            a.n_k = nk;
            break;
        }
        case AttentionKind::MLA:
            a.hidden_dim = pick(2, 8);
            a.n_h = pick(1, 4);
            a.d_c = pick(1, 6);
            a.d_l = pick(1, 6);
            a.d_rope = pick(0, 3);
            a.d_nope = pick(1, 4);
            break;
        case AttentionKind::GVA:
            a.hidden_dim = nq * dh;
            a.n_k = pick(1, 4);
            a.n_h = pick(1, 4);
            break;
        case AttentionKind::GHA:
            a.hidden_dim = nq * dh;
            a.n_k = pick(1, 4);
            a.n_v = pick(1, 4);
            a.n_h = pick(1, 4);
            break;
        case AttentionKind::GTA:
            a.hidden_dim = pick(2, 8);
            a.n_k = pick(1, 4);
            a.n_c = pick(1, 4);
            a.d_l = pick(1, 6);
            break;
    }
    a.ffn_dim = pick(1, 16);
    a.n_params = embedding_params(a) + a.num_layers * pick(50, 500);
    return a;
}

inline rooflinebench::HardwareProfile synthetic_profile(double bw, double peak) {
    rooflinebench::HardwareProfile p;
    p.name = "synthetic";
    p.architecture_class = rooflinebench::ArchitectureClass::GeneralCPU;
    p.bandwidth_gbps.theoretical = bw;
    p.peak_gflops[rooflinebench::ComputeKind::FP32].theoretical = peak;
    return p;
}

}  // namespace testing_support
