#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mctcp/engine.hpp"

namespace mctcp::config {

/// Flat `key = value` document. '#' starts a comment; blank lines are
/// ignored. Keys follow the simulation parameter table one to one, in the
/// unit named by their suffix. Unknown or repeated keys are rejected with a
/// ConfigError naming the line.
engine::SimConfig parse_config(std::string_view text, engine::SimConfig base = {});
engine::SimConfig load_config(const std::filesystem::path& path);

/// Every key with its current value, in canonical order.
std::string render_config(const engine::SimConfig& config);

std::vector<std::string> known_keys();

/// Comma-separated list of numbers ("26.5,35.4").
std::vector<double> parse_number_list(std::string_view text);

}  // namespace mctcp::config
