#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rooflinebench/arch.hpp"
#include "rooflinebench/roofline.hpp"

namespace rooflinebench::cli {

enum ExitCode : int { kOk = 0, kUserError = 1, kInternalError = 2 };

// Knobs shared by every subcommand. Precedence, lowest first: defaults,
// --config file, ROOFLINEBENCH_* environment, explicit flags.
struct ToolConfig {
    FlopsConvention convention = FlopsConvention::Fma;
    PhiSpace phi_space = PhiSpace::Raw;
    std::int64_t scenario_boundary = 512;
    CostMode cost_mode = CostMode::Detailed;
    bool kv_write_traffic = true;
    bool include_lm_head = true;

    friend bool operator==(const ToolConfig&, const ToolConfig&) = default;
};

ToolConfig parse_tool_config(std::string_view json_text);
std::string tool_config_to_json(const ToolConfig& config);

using EnvLookup = std::function<std::optional<std::string>(const char*)>;
// Applies ROOFLINEBENCH_CONVENTION, _PHI_SPACE, _SCENARIO_BOUNDARY,
// _COST_MODE, _KV_WRITE_TRAFFIC and _INCLUDE_LM_HEAD.
void apply_environment(ToolConfig& config, const EnvLookup& env);

CostOptions cost_options(const ToolConfig& config);

// Directory holding hardware_catalog.json and arch_catalog.json.
std::string data_dir();

// Whole-program entry point. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rooflinebench::cli
