#include "output.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hqflow::app {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump(const Json& j, int indent, std::string& out) {
  const std::string pad(indent, ' ');
  const std::string pad_in(indent + 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + Json(k).dump() + ": ";
        dump(v, indent + 2, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      bool flat = true;
      for (const auto& v : j)
        if (v.is_structured()) flat = false;
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad_in;
        dump(v, indent + 2, out);
      }
      out += flat ? "]" : "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump(j, 0, out);
  out += "\n";
  return out;
}

Meta make_meta(const std::string& command, const RunConfig& cfg, const Grid& grid) {
  return {command, cfg.hash, grid.describe(), cfg.problem.dom.nonsmooth()};
}

namespace {
std::string hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016" PRIx64, h);
  return buf;
}
}  // namespace

Json meta_json(const Meta& m) {
  Json j;
  j["command"] = m.command;
  j["config_hash"] = hex(m.config_hash);
  j["grid"] = m.grid.empty() ? Json(nullptr) : Json(m.grid);
  j["outside_theory"] = m.outside_theory;
  return j;
}

std::string meta_comment(const Meta& m) {
  return "# command=" + m.command + "; config_hash=" + hex(m.config_hash) +
         "; grid=" + (m.grid.empty() ? "none" : m.grid) +
         "; outside_theory=" + (m.outside_theory ? "true" : "false") + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string snapshot_csv(const Meta& m, const GridFn& u) {
  std::string s = meta_comment(m);
  s += "x,y,u\n";
  const Grid& g = u.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point p = g.node(i).x;
    s += fmt(p.x) + "," + fmt(p.y) + "," + fmt(u[i]) + "\n";
  }
  return s;
}

}  // namespace hqflow::app
