#pragma once

// Flat "key = value" run configuration with dotted section prefixes.
//
//   # comment
//   problem.k = 2
//   problem.f = "1 + 0.25*x1^2"
//
// Values may be double-quoted. Unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "hqflow/elliptic.hpp"
#include "hqflow/flow.hpp"
#include "hqflow/geometry.hpp"
#include "hqflow/problem.hpp"

namespace hqflow::app {

struct RunConfig {
  ProblemSpec problem;
  GridResolution res;
  FlowOptions flow;
  EllipticOptions eigen;
  std::string out_dir = "hqflow_out";
  /// Canonical entries (sorted key = value), the input to the hash.
  std::map<std::string, std::string> entries;
  std::uint64_t hash = 0;
};

/// Key/value pairs of a config text. Throws ConfigurationError naming the
/// line on malformed input or duplicate keys.
[[nodiscard]] std::map<std::string, std::string> parse_entries(std::string_view text);

/// Builds and checks a RunConfig. Throws ConfigurationError whose field() is
/// the offending key.
[[nodiscard]] RunConfig build_config(const std::map<std::string, std::string>& entries);

[[nodiscard]] RunConfig parse_config(std::string_view text);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// 64-bit FNV-1a.
[[nodiscard]] std::uint64_t fnv1a(std::string_view bytes);

/// Grid for the configured domain and resolution, each resolution scaled by
/// `factor` (polar: nr, ntheta; Cartesian: (n - 1) factor + 1).
[[nodiscard]] Grid make_grid(const RunConfig& cfg, int factor = 1);

}  // namespace hqflow::app
