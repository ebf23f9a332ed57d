#pragma once

#include <ostream>
#include <string_view>
#include <vector>

#include "logsp/config.hpp"

namespace logsp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitUnconverged = 2;

/// ground, excited, fiber-scan, gn-constant, regime, validate
const std::vector<std::string_view>& command_names();

/// Runs one command. Artifacts are written to cfg.output_dir (created if
/// needed), the main JSON report is also printed to `out`, and errors go to
/// `err`. Returns kExitOk, kExitUnconverged for numerical failure, or
/// kExitUsage for bad input.
int run_command(std::string_view name, const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace logsp
