#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rooflinebench/roofline.hpp"

namespace rooflinebench {

// Hardware profile JSON, shared with the accelerator probe:
//
//   {"name", "architecture_class",
//    "bandwidth_gbps": {"theoretical", "measured"},
//    "peak_gflops": {"fp32": {"theoretical", "measured"}, "fp16": {...}},
//    "source", "timestamp"}
//
// Absent values are omitted (null is accepted on input). Output uses a
// canonical key order and shortest round-trip number formatting, so
// dump(parse(dump(p))) == dump(p).
std::string dump_profile(const HardwareProfile& profile);
std::string dump_profiles(const std::vector<HardwareProfile>& profiles);

// Parses a single profile object or an array of them. Throws SchemaError
// naming the offending key and the expected type.
std::vector<HardwareProfile> parse_profile_document(std::string_view json_text);
HardwareProfile parse_profile(std::string_view json_text);

// Loads a profile file; with a non-empty name selects from a catalog.
HardwareProfile load_profile(const std::filesystem::path& path, std::string_view name = {});

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace rooflinebench
