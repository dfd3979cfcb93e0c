#include "rooflinebench/profile_io.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace rooflinebench {

using detail::json;
using detail::ordered_json;

namespace {

ordered_json pair_to_json(const BasisPair& pair) {
    ordered_json j = ordered_json::object();
    if (pair.theoretical) j["theoretical"] = *pair.theoretical;
    if (pair.measured) j["measured"] = *pair.measured;
    return j;
}

ordered_json profile_to_json(const HardwareProfile& p) {
    ordered_json j;
    j["name"] = p.name;
    j["architecture_class"] = std::string(to_string(p.architecture_class));
    j["bandwidth_gbps"] = pair_to_json(p.bandwidth_gbps);
    ordered_json peaks = ordered_json::object();
    for (const auto& [kind, pair] : p.peak_gflops) {
        peaks[std::string(to_string(kind))] = pair_to_json(pair);
    }
    j["peak_gflops"] = std::move(peaks);
    j["source"] = p.source;
    j["timestamp"] = p.timestamp;
    return j;
}

BasisPair pair_from_json(const json& j, const std::string& where) {
    detail::require_object(j, where);
    detail::reject_unknown_keys(j, {"theoretical", "measured"}, where);
    return {detail::opt_number(j, "theoretical", where), detail::opt_number(j, "measured", where)};
}

HardwareProfile profile_from_json(const json& j, const std::string& where) {
    detail::require_object(j, where);
    detail::reject_unknown_keys(j,
                                {"name", "architecture_class", "bandwidth_gbps", "peak_gflops",
                                 "source", "timestamp"},
                                where);
    HardwareProfile p;
    p.name = detail::required(detail::opt_string(j, "name", where), "name", where, "string");
    p.architecture_class = parse_architecture_class(detail::required(
        detail::opt_string(j, "architecture_class", where), "architecture_class", where, "string"));

    auto bw = j.find("bandwidth_gbps");
    if (bw == j.end()) throw SchemaError(where + ".bandwidth_gbps: missing required object");
    p.bandwidth_gbps = pair_from_json(*bw, where + ".bandwidth_gbps");

    if (auto peaks = j.find("peak_gflops"); peaks != j.end() && !peaks->is_null()) {
        detail::require_object(*peaks, where + ".peak_gflops");
        for (const auto& [key, value] : peaks->items()) {
            ComputeKind kind;
            try {
                kind = parse_compute_kind(key);
            } catch (const ConfigError&) {
                throw SchemaError(fmt::format("{}.peak_gflops: unknown precision key '{}'", where, key));
            }
            p.peak_gflops[kind] = pair_from_json(value, fmt::format("{}.peak_gflops.{}", where, key));
        }
    }
    p.source = detail::opt_string(j, "source", where).value_or("");
    p.timestamp = detail::opt_string(j, "timestamp", where).value_or("");
    validate(p);
    return p;
}

}  // namespace

std::string dump_profile(const HardwareProfile& profile) {
    return profile_to_json(profile).dump(2) + "\n";
}

std::string dump_profiles(const std::vector<HardwareProfile>& profiles) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : profiles) arr.push_back(profile_to_json(p));
    return arr.dump(2) + "\n";
}

std::vector<HardwareProfile> parse_profile_document(std::string_view json_text) {
    const json doc = detail::parse_json(json_text, "profile");
    std::vector<HardwareProfile> out;
    if (doc.is_array()) {
        for (std::size_t i = 0; i < doc.size(); ++i) {
            out.push_back(profile_from_json(doc[i], fmt::format("profile[{}]", i)));
        }
    } else {
        out.push_back(profile_from_json(doc, "profile"));
    }
    return out;
}

HardwareProfile parse_profile(std::string_view json_text) {
    auto all = parse_profile_document(json_text);
    if (all.size() != 1) {
        throw SchemaError(fmt::format("profile: expected one profile, found {}", all.size()));
    }
    return all.front();
}

HardwareProfile load_profile(const std::filesystem::path& path, std::string_view name) {
    auto all = parse_profile_document(read_text_file(path));
    if (name.empty()) {
        if (all.size() != 1) {
            throw ConfigError(fmt::format(
                "{} holds {} profiles; select one by name", path.string(), all.size()));
        }
        return all.front();
    }
    std::string names;
    for (const auto& p : all) {
        if (p.name == name) return p;
        names += names.empty() ? p.name : ", " + p.name;
    }
    throw ConfigError(fmt::format("no profile named '{}' in {} (available: {})", name,
                                  path.string(), names));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ConfigError(fmt::format("write to '{}' failed", path.string()));
}

}  // namespace rooflinebench
