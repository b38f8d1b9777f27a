#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace alignforge::cli {

inline constexpr std::string_view kVersion = "0.1.0";

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// {version, config_hash, seed} stamped into every output.
nlohmann::ordered_json provenance(const nlohmann::ordered_json& resolved_config, std::uint64_t seed);

/// Runs one subcommand. `args[0]` is the program name. Returns 0 on success,
/// 1 on a usage error, 2 on a data error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args);

}  // namespace alignforge::cli
