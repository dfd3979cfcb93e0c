#include <gtest/gtest.h>

#include <random>

#include "oracle/brute_force.hpp"
#include "rooflinebench/arch.hpp"
#include "rooflinebench/arch_io.hpp"
#include "rooflinebench/error.hpp"
#include "support.hpp"

using namespace rooflinebench;

namespace {

constexpr AttentionKind kAllKinds[] = {AttentionKind::MHA, AttentionKind::GQA, AttentionKind::MLA,
                                       AttentionKind::GVA, AttentionKind::GHA, AttentionKind::GTA};

ArchConfig small_mha() {
    ArchConfig a;
    a.name = "small";
    a.attention = AttentionKind::MHA;
    a.hidden_dim = 8;
    a.num_layers = 2;
    a.n_q = 2;
    a.n_h = 2;
    a.d_h = 4;
    a.ffn_dim = 16;
    a.vocab_size = 10;
    a.n_params = 1000;
    return a;
}

ArchConfig qwen_like() {
    return load_arch(testing_support::data_dir() / "arch_catalog.json", "Qwen2.5-1.5B");
}

}  // namespace

TEST(KvCache, MhaClosedForm) {
    ArchConfig a = small_mha();
    a.hidden_dim = 16 * 128;
    a.n_q = 16;
    a.n_h = 16;
    a.d_h = 128;
    EXPECT_EQ(kv_cache_elements_per_layer(a, 1024), 4194304.0);
    EXPECT_EQ(kv_cache_elements_per_layer(a, 1024), static_cast<double>(oracle::kv_cache_slots(a, 1024)));
}

TEST(KvCache, MlaClosedForm) {
    ArchConfig a = small_mha();
    a.attention = AttentionKind::MLA;
    a.d_c = 512;
    a.d_rope = 64;
    a.d_nope = 128;
    a.d_l = 512;
    EXPECT_EQ(kv_cache_elements_per_layer(a, 100), 57600.0);
    EXPECT_EQ(oracle::kv_cache_slots(a, 100), 57600);
}

TEST(KvCache, ZeroContextIsEmpty) {
    std::mt19937_64 rng(3);
    for (auto kind : kAllKinds) {
        EXPECT_EQ(kv_cache_elements_per_layer(testing_support::random_arch(rng, kind), 0), 0.0);
    }
}

TEST(KvCache, MissingFieldIsNamed) {
    ArchConfig a = small_mha();
    a.attention = AttentionKind::MLA;
    a.d_rope = 64;
    try {
        (void)kv_cache_elements_per_layer(a, 4);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("d_c"), std::string::npos) << e.what();
    }
}

TEST(KvCache, NegativeContextRejected) {
    EXPECT_THROW((void)kv_cache_elements_per_layer(small_mha(), -1), DomainError);
}

TEST(AttentionFlops, SmallMhaExample) {
    const ArchConfig a = small_mha();
    EXPECT_EQ(attention_flops_sequence(a, 3, FlopsConvention::Mac), 144.0);
    EXPECT_EQ(attention_flops_sequence(a, 3, FlopsConvention::Fma), 288.0);
    EXPECT_EQ(attention_flops_sequence(a, 0, FlopsConvention::Fma), 0.0);
    EXPECT_EQ(oracle::attention_macs(a, 3, 3), 144);
}

// Closed forms against the enumeration oracle for every variant, N in [0, 64].
TEST(OracleEquivalence, KvAndAttentionAllVariants) {
    std::mt19937_64 rng(20240611);
    for (auto kind : kAllKinds) {
        for (int trial = 0; trial < 8; ++trial) {
            const ArchConfig a = testing_support::random_arch(rng, kind);
            ASSERT_NO_THROW(validate(a)) << to_string(kind);
            for (std::int64_t n = 0; n <= 64; ++n) {
                ASSERT_EQ(kv_cache_elements_per_layer(a, n), static_cast<double>(oracle::kv_cache_slots(a, n)))
                    << to_string(kind) << " N=" << n;
                ASSERT_EQ(attention_flops_sequence(a, n, FlopsConvention::Mac),
                          static_cast<double>(oracle::attention_macs(a, n, n)))
                    << to_string(kind) << " N=" << n;
            }
        }
    }
}

TEST(OracleEquivalence, LinearAllVariants) {
    std::mt19937_64 rng(7);
    for (auto kind : kAllKinds) {
        for (int trial = 0; trial < 8; ++trial) {
            const ArchConfig a = testing_support::random_arch(rng, kind);
            for (std::int64_t n : {1, 2, 5}) {
                EXPECT_EQ(linear_macs_per_token(a) * static_cast<double>(n),
                          static_cast<double>(oracle::linear_macs(a, n)))
                    << to_string(kind);
            }
        }
    }
}

TEST(OracleEquivalence, DecodeAttentionIsOneQueryRow) {
    std::mt19937_64 rng(11);
    for (auto kind : kAllKinds) {
        const ArchConfig a = testing_support::random_arch(rng, kind);
        CostOptions o;
        o.convention = FlopsConvention::Mac;
        for (std::int64_t n = 1; n <= 32; ++n) {
            const auto c = decode_step_cost(a, n, Precision::fp16(), Precision::fp16(), o);
            EXPECT_EQ(c.flops_attention,
                      static_cast<double>(a.num_layers * oracle::attention_macs(a, 1, n)));
        }
    }
}

TEST(DecodeStep, WorkedExampleBytes) {
    CostOptions o;
    o.convention = FlopsConvention::Mac;
    o.include_lm_head = false;
    const auto c = decode_step_cost(small_mha(), 3, Precision::fp16(), Precision::fp16(), o);
    EXPECT_EQ(c.bytes_weights, 2000.0);
    EXPECT_EQ(c.bytes_kv_read, 192.0);
    EXPECT_EQ(c.bytes_kv_write, 64.0);
    EXPECT_EQ(c.total_bytes(), 2256.0);
    EXPECT_EQ(c.flops_lm_head, 0.0);
    EXPECT_EQ(c.total_flops(), c.flops_attention + c.flops_linear + c.flops_ffn + c.flops_lm_head);
}

TEST(DecodeStep, WeightsOnlyOiFollowsBytesPerWeight) {
    const auto o = CostOptions::weights_only(FlopsConvention::Fma, CostMode::Approx);
    const ArchConfig a = qwen_like();
    const auto fp16 = decode_step_cost(a, 1, Precision::fp16(), Precision::fp16(), o);
    EXPECT_EQ(fp16.total_flops() / fp16.total_bytes(), 1.0);
    const auto q8 = decode_step_cost(a, 1, Precision::q8_0(), Precision::fp16(), o);
    EXPECT_NEAR(q8.total_flops() / q8.total_bytes(), 1.882, 1e-3);
}

TEST(DecodeStep, DomainAndPrecisionErrors) {
    const CostOptions o;
    EXPECT_THROW(decode_step_cost(small_mha(), 0, Precision::fp16(), Precision::fp16(), o), DomainError);
    Precision bad = Precision::fp16();
    bad.bytes_per_weight = 0.0;
    EXPECT_THROW(decode_step_cost(small_mha(), 4, bad, Precision::fp16(), o), ConfigError);
    EXPECT_THROW(decode_step_cost(small_mha(), 4, Precision::fp16(), bad, o), ConfigError);
}

TEST(DecodeStep, StrictlyIncreasingInContext) {
    std::mt19937_64 rng(5);
    for (auto kind : kAllKinds) {
        const ArchConfig a = testing_support::random_arch(rng, kind);
        const CostOptions o;
        auto prev = decode_step_cost(a, 1, Precision::fp16(), Precision::fp16(), o);
        for (std::int64_t n = 2; n <= 64; ++n) {
            const auto cur = decode_step_cost(a, n, Precision::fp16(), Precision::fp16(), o);
            EXPECT_GT(cur.total_flops(), prev.total_flops()) << to_string(kind) << " N=" << n;
            EXPECT_GT(cur.total_bytes(), prev.total_bytes()) << to_string(kind) << " N=" << n;
            prev = cur;
        }
    }
}

TEST(Convention, FmaDoublesEverything) {
    std::mt19937_64 rng(9);
    for (auto kind : kAllKinds) {
        const ArchConfig a = testing_support::random_arch(rng, kind);
        for (std::int64_t n : {0, 1, 17}) {
            EXPECT_EQ(attention_flops_sequence(a, n, FlopsConvention::Fma),
                      2.0 * attention_flops_sequence(a, n, FlopsConvention::Mac));
        }
        for (auto mode : {CostMode::Detailed, CostMode::Approx}) {
            CostOptions mac, fma;
            mac.convention = FlopsConvention::Mac;
            mac.mode = fma.mode = mode;
            const auto m = decode_step_cost(a, 9, Precision::fp16(), Precision::fp16(), mac);
            const auto f = decode_step_cost(a, 9, Precision::fp16(), Precision::fp16(), fma);
            EXPECT_EQ(f.flops_attention, 2.0 * m.flops_attention);
            EXPECT_EQ(f.flops_linear, 2.0 * m.flops_linear);
            EXPECT_EQ(f.flops_ffn, 2.0 * m.flops_ffn);
            EXPECT_EQ(f.flops_lm_head, 2.0 * m.flops_lm_head);
            EXPECT_EQ(f.total_bytes(), m.total_bytes());
            const auto mp = prefill_cost(a, 9, Precision::fp16(), Precision::fp16(), mac);
            const auto fp = prefill_cost(a, 9, Precision::fp16(), Precision::fp16(), fma);
            EXPECT_EQ(fp.total_flops(), 2.0 * mp.total_flops());
        }
    }
}

TEST(Degeneration, GqaWithFullKvHeadsIsMha) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        ArchConfig mha = testing_support::random_arch(rng, AttentionKind::MHA);
        mha.n_h = mha.n_q;
        ArchConfig gqa = mha;
        gqa.attention = AttentionKind::GQA;
        gqa.n_k = mha.n_q;
        ASSERT_NO_THROW(validate(gqa));
        for (std::int64_t n = 0; n <= 16; ++n) {
            EXPECT_EQ(kv_cache_elements_per_layer(gqa, n), kv_cache_elements_per_layer(mha, n));
            EXPECT_EQ(attention_flops_sequence(gqa, n, FlopsConvention::Mac),
                      attention_flops_sequence(mha, n, FlopsConvention::Mac));
        }
        EXPECT_EQ(linear_macs_per_token(gqa), linear_macs_per_token(mha));
    }
}

TEST(Validate, HeadProductMustMatchWidth) {
    ArchConfig a = small_mha();
    a.d_h = 3;
    EXPECT_THROW(validate(a), ConfigError);
    a = small_mha();
    a.attention = AttentionKind::GTA;  // exempt from the product rule
    a.d_h = 3;
    a.n_k = 1;
    a.n_c = 1;
    a.d_l = 2;
    EXPECT_NO_THROW(validate(a));
}

TEST(Validate, GqaGroupDivisibility) {
    ArchConfig a = small_mha();
    a.attention = AttentionKind::GQA;
    a.hidden_dim = 12;
    a.n_q = 3;
    a.n_h = 3;
    a.n_k = 2;
    EXPECT_THROW(validate(a), ConfigError);
    a.n_k = 4;
    EXPECT_THROW(validate(a), ConfigError);
    a.n_k = 3;
    EXPECT_NO_THROW(validate(a));
}

TEST(Validate, MlaNeedsSomeEmbeddingWidth) {
    ArchConfig a = small_mha();
    a.attention = AttentionKind::MLA;
    a.d_c = 4;
    a.d_l = 4;
    a.d_rope = 0;
    a.d_nope = 0;
    EXPECT_THROW(validate(a), ConfigError);
    a.d_nope = 2;
    EXPECT_NO_THROW(validate(a));
}

TEST(ScaleLayers, IdentityAtSameDepth) {
    const ArchConfig a = qwen_like();
    EXPECT_EQ(scale_layers(a, a.num_layers), a);
}

TEST(ScaleLayers, SmallFixture) {
    ArchConfig a = small_mha();
    a.n_params = 1080;  // 80 embedding + 2 layers of 500
    const ArchConfig b = scale_layers(a, 3);
    EXPECT_EQ(b.num_layers, 3);
    EXPECT_EQ(b.n_params, 1580);
    a.tied_embeddings = false;
    a.n_params = 1160;
    EXPECT_EQ(scale_layers(a, 3).n_params, 160 + 1500);
}

TEST(ScaleLayers, LinearInDepth) {
    const ArchConfig a = qwen_like();
    const auto p2 = scale_layers(a, 2).n_params;
    const auto p4 = scale_layers(a, 4).n_params;
    const auto slope = (p4 - p2) / 2;
    for (std::int64_t l : {8, 16, 64}) EXPECT_EQ(scale_layers(a, l).n_params, p2 + slope * (l - 2));
    EXPECT_THROW(scale_layers(a, 0), DomainError);
}

TEST(ScaleLayers, OiInvariantWithoutEmbeddingTraffic) {
    CostOptions o = CostOptions::weights_only(FlopsConvention::Fma, CostMode::Approx);
    o.embedding_weight_traffic = false;
    ArchConfig a = qwen_like();
    a.n_params = embedding_params(a) + a.num_layers * 1000;  // exact per-layer count
    o.mode = CostMode::Detailed;
    const auto base = decode_step_cost(a, 1, Precision::fp16(), Precision::fp16(), o);
    // Detailed weights-only FLOPs scale with L, bytes too; their ratio is fixed.
    for (std::int64_t l : {2, 4, 8, 64}) {
        const auto c = decode_step_cost(scale_layers(a, l), 1, Precision::fp16(), Precision::fp16(), o);
        EXPECT_DOUBLE_EQ(c.total_flops() / c.total_bytes(), base.total_flops() / base.total_bytes()) << l;
    }
}

TEST(Prefill, WritesPromptKvAndStreamsWeightsOnce) {
    CostOptions o;
    o.convention = FlopsConvention::Mac;
    const ArchConfig a = small_mha();
    const auto c = prefill_cost(a, 5, Precision::fp16(), Precision::fp16(), o);
    EXPECT_EQ(c.bytes_weights, 2000.0);
    EXPECT_EQ(c.bytes_kv_read, 0.0);
    EXPECT_EQ(c.bytes_kv_write, 2.0 * kv_cache_elements_per_layer(a, 5) * 2.0);
    EXPECT_EQ(c.flops_attention, 2.0 * attention_flops_sequence(a, 5, FlopsConvention::Mac));
    EXPECT_EQ(c.flops_lm_head, 80.0);
    EXPECT_THROW(prefill_cost(a, 0, Precision::fp16(), Precision::fp16(), o), DomainError);
}

TEST(Enums, RoundTrip) {
    for (auto k : kAllKinds) EXPECT_EQ(parse_attention_kind(to_string(k)), k);
    EXPECT_EQ(parse_attention_kind("gqa"), AttentionKind::GQA);
    EXPECT_THROW(parse_attention_kind("xqa"), ConfigError);
    EXPECT_EQ(parse_convention("MAC"), FlopsConvention::Mac);
    EXPECT_EQ(parse_cost_mode("approx"), CostMode::Approx);
    EXPECT_EQ(parse_ffn_kind("plain"), FfnKind::Plain);
}
