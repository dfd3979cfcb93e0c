#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rooflinebench/arch.hpp"

namespace rooflinebench {

// Architecture definition files hold either a single object or an array of
// objects with the keys {name, attention, hidden_dim, num_layers, n_q, n_k,
// n_v, n_h, n_c, d_h, d_l, d_c, d_rope, d_nope, ffn_dim, ffn_kind,
// vocab_size, n_params, tied_embeddings}. Unknown keys are rejected.
std::vector<ArchConfig> parse_arch_document(std::string_view json_text);

// Loads a definition file. With a non-empty name, selects that entry from
// a catalog; a file with several entries requires a name.
ArchConfig load_arch(const std::filesystem::path& path, std::string_view name = {});

std::string arch_to_json(const ArchConfig& arch);

}  // namespace rooflinebench
