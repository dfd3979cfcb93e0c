#include "rooflinebench/arch_io.hpp"

#include "json_util.hpp"
#include "rooflinebench/profile_io.hpp"

namespace rooflinebench {

using detail::json;
using detail::ordered_json;

namespace {

ArchConfig arch_from_json(const json& j, const std::string& where) {
    detail::require_object(j, where);
    detail::reject_unknown_keys(
        j,
        {"name", "attention", "hidden_dim", "num_layers", "n_q", "n_k", "n_v", "n_h", "n_c", "d_h",
         "d_l", "d_c", "d_rope", "d_nope", "ffn_dim", "ffn_kind", "vocab_size", "n_params",
         "tied_embeddings"},
        where);
    ArchConfig a;
    a.name = detail::required(detail::opt_string(j, "name", where), "name", where, "string");
    a.attention = parse_attention_kind(
        detail::required(detail::opt_string(j, "attention", where), "attention", where, "string"));
    a.hidden_dim = detail::required(detail::opt_integer(j, "hidden_dim", where), "hidden_dim",
                                    where, "integer");
    a.num_layers = detail::required(detail::opt_integer(j, "num_layers", where), "num_layers",
                                    where, "integer");
    a.n_q = detail::opt_integer(j, "n_q", where);
    a.n_k = detail::opt_integer(j, "n_k", where);
    a.n_v = detail::opt_integer(j, "n_v", where);
    a.n_h = detail::opt_integer(j, "n_h", where);
    a.n_c = detail::opt_integer(j, "n_c", where);
    a.d_h = detail::opt_integer(j, "d_h", where);
    a.d_l = detail::opt_integer(j, "d_l", where);
    a.d_c = detail::opt_integer(j, "d_c", where);
    a.d_rope = detail::opt_integer(j, "d_rope", where);
    a.d_nope = detail::opt_integer(j, "d_nope", where);
    a.ffn_dim =
        detail::required(detail::opt_integer(j, "ffn_dim", where), "ffn_dim", where, "integer");
    if (auto k = detail::opt_string(j, "ffn_kind", where)) a.ffn_kind = parse_ffn_kind(*k);
    a.vocab_size = detail::required(detail::opt_integer(j, "vocab_size", where), "vocab_size",
                                    where, "integer");
    a.n_params =
        detail::required(detail::opt_integer(j, "n_params", where), "n_params", where, "integer");
    a.tied_embeddings = detail::opt_bool(j, "tied_embeddings", where).value_or(true);
    validate(a);
    return a;
}

}  // namespace

std::vector<ArchConfig> parse_arch_document(std::string_view json_text) {
    const json doc = detail::parse_json(json_text, "arch");
    std::vector<ArchConfig> out;
    if (doc.is_array()) {
        for (std::size_t i = 0; i < doc.size(); ++i) {
            out.push_back(arch_from_json(doc[i], fmt::format("arch[{}]", i)));
        }
    } else {
        out.push_back(arch_from_json(doc, "arch"));
    }
    return out;
}

ArchConfig load_arch(const std::filesystem::path& path, std::string_view name) {
    auto all = parse_arch_document(read_text_file(path));
    if (name.empty()) {
        if (all.size() != 1) {
            throw ConfigError(fmt::format("{} holds {} architectures; select one by name",
                                          path.string(), all.size()));
        }
        return all.front();
    }
    std::string names;
    for (const auto& a : all) {
        if (a.name == name) return a;
        names += names.empty() ? a.name : ", " + a.name;
    }
    throw ConfigError(fmt::format("no architecture named '{}' in {} (available: {})", name,
                                  path.string(), names));
}

std::string arch_to_json(const ArchConfig& a) {
    ordered_json j;
    j["name"] = a.name;
    j["attention"] = std::string(to_string(a.attention));
    j["hidden_dim"] = a.hidden_dim;
    j["num_layers"] = a.num_layers;
    auto put = [&](const char* key, const std::optional<std::int64_t>& v) {
        if (v) j[key] = *v;
    };
    put("n_q", a.n_q);
    put("n_k", a.n_k);
    put("n_v", a.n_v);
    put("n_h", a.n_h);
    put("n_c", a.n_c);
    put("d_h", a.d_h);
    put("d_l", a.d_l);
    put("d_c", a.d_c);
    put("d_rope", a.d_rope);
    put("d_nope", a.d_nope);
    j["ffn_dim"] = a.ffn_dim;
    j["ffn_kind"] = std::string(to_string(a.ffn_kind));
    j["vocab_size"] = a.vocab_size;
    j["n_params"] = a.n_params;
    j["tied_embeddings"] = a.tied_embeddings;
    return j.dump(2) + "\n";
}

}  // namespace rooflinebench
