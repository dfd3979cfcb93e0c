#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

#include <fmt/format.h>
#include "json.hpp"

#include "rooflinebench/error.hpp"

namespace rooflinebench::detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline std::string type_name(const json& j) { return j.type_name(); }

inline void require_object(const json& j, std::string_view where) {
    if (!j.is_object()) {
        throw SchemaError(fmt::format("{}: expected object, got {}", where, type_name(j)));
    }
}

inline void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                                std::string_view where) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw SchemaError(fmt::format("{}: unknown key '{}'", where, key));
    }
}

inline std::optional<double> opt_number(const json& obj, const char* key, std::string_view where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) {
        throw SchemaError(fmt::format("{}.{}: expected number, got {}", where, key, type_name(*it)));
    }
    return it->get<double>();
}

inline std::optional<std::int64_t> opt_integer(const json& obj, const char* key,
                                               std::string_view where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (it->is_number_integer()) return it->get<std::int64_t>();
    if (it->is_number_float()) {
        const double d = it->get<double>();
        const auto i = static_cast<std::int64_t>(d);
        if (static_cast<double>(i) == d) return i;
    }
    throw SchemaError(fmt::format("{}.{}: expected integer, got {}", where, key,
                                  it->is_number() ? "non-integral number" : type_name(*it)));
}

inline std::optional<std::string> opt_string(const json& obj, const char* key,
                                             std::string_view where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) {
        throw SchemaError(fmt::format("{}.{}: expected string, got {}", where, key, type_name(*it)));
    }
    return it->get<std::string>();
}

inline std::optional<bool> opt_bool(const json& obj, const char* key, std::string_view where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_boolean()) {
        throw SchemaError(fmt::format("{}.{}: expected boolean, got {}", where, key, type_name(*it)));
    }
    return it->get<bool>();
}

template <class T>
T required(std::optional<T> v, const char* key, std::string_view where, std::string_view type) {
    if (!v) throw SchemaError(fmt::format("{}.{}: missing required {}", where, key, type));
    return *v;
}

inline json parse_json(std::string_view text, std::string_view what) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw SchemaError(fmt::format("{}: invalid JSON: {}", what, e.what()));
    }
}

}  // namespace rooflinebench::detail
