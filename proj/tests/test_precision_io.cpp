#include <gtest/gtest.h>

#include "rooflinebench/arch_io.hpp"
#include "rooflinebench/error.hpp"
#include "rooflinebench/precision.hpp"
#include "support.hpp"

using namespace rooflinebench;

TEST(Precision, DefaultByteCosts) {
    EXPECT_EQ(Precision::fp32().bytes_per_weight, 4.0);
    EXPECT_EQ(Precision::fp16().bytes_per_weight, 2.0);
    EXPECT_EQ(Precision::q8_0().bytes_per_weight, 1.0625);
    EXPECT_EQ(Precision::q4_k_m().bytes_per_weight, 0.5625);
}

TEST(Precision, CustomBounds) {
    EXPECT_EQ(Precision::custom(8.0).bytes_per_weight, 8.0);
    EXPECT_EQ(Precision::custom(0.25).kind, PrecisionKind::Custom);
    EXPECT_THROW(Precision::custom(0.0), ConfigError);
    EXPECT_THROW(Precision::custom(8.5), ConfigError);
    EXPECT_THROW(Precision::of(PrecisionKind::Custom), ConfigError);
}

TEST(Precision, Parse) {
    EXPECT_EQ(parse_precision("fp16").kind, PrecisionKind::FP16);
    EXPECT_EQ(parse_precision("Q4_K_M").kind, PrecisionKind::Q4_K_M);
    EXPECT_EQ(parse_precision("custom:1.5").bytes_per_weight, 1.5);
    EXPECT_THROW(parse_precision("custom:abc"), ConfigError);
    EXPECT_THROW(parse_precision("int3"), ConfigError);
}

TEST(Precision, QuantLabels) {
    EXPECT_EQ(precision_from_quant_label("F16")->kind, PrecisionKind::FP16);
    EXPECT_EQ(precision_from_quant_label("Q8_0")->kind, PrecisionKind::Q8_0);
    EXPECT_FALSE(precision_from_quant_label("IQ2_XS").has_value());
}

TEST(ArchIo, CatalogLoadsAndValidates) {
    const auto all = parse_arch_document(
        read_text_file(testing_support::data_dir() / "arch_catalog.json"));
    ASSERT_GE(all.size(), 11u);
    for (const auto& a : all) EXPECT_NO_THROW(validate(a)) << a.name;
    const auto plm = load_arch(testing_support::data_dir() / "arch_catalog.json", "PLM-1.8B");
    EXPECT_EQ(plm.attention, AttentionKind::MLA);
}

TEST(ArchIo, RoundTrip) {
    for (const auto& a : parse_arch_document(
             read_text_file(testing_support::data_dir() / "arch_catalog.json"))) {
        const auto back = parse_arch_document(arch_to_json(a));
        ASSERT_EQ(back.size(), 1u);
        EXPECT_EQ(back.front(), a) << a.name;
    }
}

TEST(ArchIo, UnknownKeyRejectedByName) {
    const std::string doc = R"({"name":"x","attention":"mha","hidden_dim":8,"num_layers":1,
        "n_q":2,"d_h":4,"ffn_dim":8,"vocab_size":4,"n_params":100,"head_dim":4})";
    try {
        (void)parse_arch_document(doc);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("head_dim"), std::string::npos) << e.what();
    }
}

TEST(ArchIo, ValidationRunsOnLoad) {
    const std::string doc = R"({"name":"x","attention":"gqa","hidden_dim":8,"num_layers":1,
        "n_q":2,"n_k":3,"d_h":4,"ffn_dim":8,"vocab_size":4,"n_params":100})";
    EXPECT_THROW((void)parse_arch_document(doc), ConfigError);
}

TEST(ArchIo, MissingNameSelection) {
    EXPECT_THROW(load_arch(testing_support::data_dir() / "arch_catalog.json"), ConfigError);
    EXPECT_THROW(load_arch(testing_support::data_dir() / "arch_catalog.json", "GPT-5"), ConfigError);
}
