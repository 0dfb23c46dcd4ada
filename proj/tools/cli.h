// SPDX-License-Identifier: MIT

#ifndef SIXDOF_TOOLS_CLI_H_
#define SIXDOF_TOOLS_CLI_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace sixdof::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Runs one command line. `args` excludes the program name. Human-readable
// progress goes to `out`, diagnostics and the seed echo go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// FNV-1a 64-bit hash.
std::uint64_t fnv1a64(const std::string& text);

// {"version", "seed", "config_hash"} where config_hash is the FNV-1a hash of
// the compact, key-sorted dump of `config`, printed as 16 hex digits.
nlohmann::json reproducibility(std::uint64_t seed, const nlohmann::json& config);

}  // namespace sixdof::cli

#endif  // SIXDOF_TOOLS_CLI_H_
