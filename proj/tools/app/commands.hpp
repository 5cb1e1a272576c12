#pragma once

// The hqflow subcommands. Each returns a process exit code:
//   0 ok, 1 check failed, 2 configuration error, 3 divergence,
//   4 t_max reached, 5 eps trace not Cauchy (or not monotone).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hqflow::app {

enum ExitCode : int {
  exit_ok = 0,
  exit_failed = 1,
  exit_config = 2,
  exit_diverged = 3,
  exit_t_max = 4,
  exit_non_cauchy = 5,
};

struct CommandContext {
  /// Replaces output.dir when set (HQFLOW_OUT).
  std::optional<std::filesystem::path> out_override;
  std::ostream* log = nullptr;  ///< progress and diagnostics; nullptr for silence
};

int cmd_flow(const std::filesystem::path& config, const CommandContext& ctx);
int cmd_eigen(const std::filesystem::path& config, const CommandContext& ctx);
int cmd_verify(std::uint64_t seed, long trials, bool inject_fault, const CommandContext& ctx);
int cmd_converge(const std::filesystem::path& config, const std::vector<int>& factors,
                 const CommandContext& ctx);

/// "3" -> {1, 2, 4}; "1,2,4" -> {1, 2, 4}. Throws ArgumentError on repeated
/// factors, non-positive entries, or fewer than two levels.
[[nodiscard]] std::vector<int> parse_levels(const std::string& spec);

/// Full command line entry point (reads HQFLOW_OUT).
int run_cli(int argc, char** argv);

}  // namespace hqflow::app
