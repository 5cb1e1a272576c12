#pragma once

// Deterministic CSV/JSON writers. Floats are printed with 17 significant
// digits; every file starts with run metadata.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "config.hpp"
#include "hqflow/geometry.hpp"

namespace hqflow::app {

using Json = nlohmann::ordered_json;

/// %.17g; "nan", "inf", "-inf" for non-finite values.
[[nodiscard]] std::string fmt(double v);

/// Two-space indented JSON with %.17g floats and null for non-finite ones.
[[nodiscard]] std::string dump_json(const Json& j);

struct Meta {
  std::string command;
  std::uint64_t config_hash = 0;
  std::string grid;  ///< empty when no grid is involved
  bool outside_theory = false;
};

[[nodiscard]] Meta make_meta(const std::string& command, const RunConfig& cfg, const Grid& grid);
[[nodiscard]] Json meta_json(const Meta& m);
/// "# command=...; config_hash=0x...; grid=...; outside_theory=false\n"
[[nodiscard]] std::string meta_comment(const Meta& m);

/// Writes bytes exactly; creates parent directories. Throws std::runtime_error.
void write_file(const std::filesystem::path& path, const std::string& content);

/// x,y,u snapshot in node order.
[[nodiscard]] std::string snapshot_csv(const Meta& m, const GridFn& u);

}  // namespace hqflow::app
