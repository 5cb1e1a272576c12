#include "config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "hqflow/errors.hpp"
#include "hqflow/expr.hpp"

namespace hqflow::app {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "problem.k", "problem.l", "problem.domain", "problem.R", "problem.a", "problem.b",
      "problem.L", "problem.f", "problem.phi", "problem.u0", "problem.exact", "problem.y0",
      "problem.allow_nonsmooth", "grid.nr", "grid.ntheta", "grid.n", "flow.mode",
      "flow.integrator", "flow.cfl", "flow.dt_init", "flow.dt_max", "flow.dt_growth",
      "flow.tol_steady", "flow.tol_trans", "flow.window", "flow.t_max", "flow.max_steps",
      "flow.checkpoint_every", "eigen.eps0", "eigen.levels", "eigen.tol", "eigen.dt_init",
      "eigen.dt_max", "eigen.growth", "eigen.max_steps", "output.dir"};
  return keys;
}

class Reader {
 public:
  explicit Reader(const std::map<std::string, std::string>& e) : e_(e) {}

  [[nodiscard]] bool has(const std::string& key) const { return e_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& dflt) const {
    const auto it = e_.find(key);
    return it == e_.end() ? dflt : it->second;
  }

  double real(const std::string& key, double dflt) const {
    const auto it = e_.find(key);
    if (it == e_.end()) return dflt;
    return parse_real(key, it->second);
  }

  long integer(const std::string& key, long dflt) const {
    const auto it = e_.find(key);
    if (it == e_.end()) return dflt;
    long v = 0;
    const auto& s = it->second;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw ConfigurationError("expected an integer, got '" + s + "'", key);
    return v;
  }

  bool boolean(const std::string& key, bool dflt) const {
    const auto it = e_.find(key);
    if (it == e_.end()) return dflt;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigurationError("expected true or false, got '" + it->second + "'", key);
  }

  Expr expr(const std::string& key, ExprSlot slot, bool required) const {
    const auto it = e_.find(key);
    if (it == e_.end()) {
      if (required) throw ConfigurationError("missing required entry", key);
      return {};
    }
    try {
      return parse_expr(it->second, slot);
    } catch (const ParseError& e) {
      throw ConfigurationError(e.what(), key);
    }
  }

  static double parse_real(const std::string& key, const std::string& s) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw ConfigurationError("expected a number, got '" + s + "'", key);
    return v;
  }

 private:
  const std::map<std::string, std::string>& e_;
};

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::map<std::string, std::string> parse_entries(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno);
    std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigurationError("expected 'key = value'", where);
    const std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigurationError("empty key", where);
    if (!value.empty() && value.front() == '"') {
      const auto close = value.find('"', 1);
      if (close == std::string::npos) throw ConfigurationError("unterminated string", where);
      const std::string rest = trim(std::string_view(value).substr(close + 1));
      if (!rest.empty() && rest[0] != '#') throw ConfigurationError("text after string", where);
      value = value.substr(1, close - 1);
    } else if (const auto hash = value.find('#'); hash != std::string::npos) {
      value = trim(std::string_view(value).substr(0, hash));
    }
    if (!out.emplace(key, value).second) throw ConfigurationError("duplicate key", key);
  }
  return out;
}

RunConfig build_config(const std::map<std::string, std::string>& entries) {
  for (const auto& [k, v] : entries)
    if (!known_keys().count(k)) throw ConfigurationError("unknown key", k);
  const Reader r(entries);
  RunConfig cfg;
  cfg.entries = entries;
  std::string canon;
  for (const auto& [k, v] : entries) canon += k + " = " + v + "\n";
  cfg.hash = fnv1a(canon);

  ProblemSpec& p = cfg.problem;
  p.q.k = static_cast<int>(r.integer("problem.k", 1));
  p.q.l = static_cast<int>(r.integer("problem.l", 0));
  p.q.n = 2;
  try {
    p.q.validate();
  } catch (const ArgumentError& e) {
    throw ConfigurationError(e.what(), r.has("problem.l") ? "problem.l" : "problem.k");
  }

  const std::string dom = r.str("problem.domain", "disk");
  auto positive = [&](const std::string& key, double dflt) {
    const double v = r.real(key, dflt);
    if (!(v > 0.0)) throw ConfigurationError("must be positive", key);
    return v;
  };
  if (dom == "disk") {
    p.dom = Domain::disk(positive("problem.R", 1.0));
  } else if (dom == "ellipse") {
    p.dom = Domain::ellipse(positive("problem.a", 1.0), positive("problem.b", 1.0));
  } else if (dom == "square") {
    p.dom = Domain::square(positive("problem.L", 1.0));
  } else {
    throw ConfigurationError("expected disk, ellipse or square, got '" + dom + "'",
                             "problem.domain");
  }
  p.allow_nonsmooth = r.boolean("problem.allow_nonsmooth", false);
  if (p.dom.nonsmooth() && !p.allow_nonsmooth)
    throw ConfigurationError(
        "the square is not smooth and strictly convex; set problem.allow_nonsmooth = true",
        "problem.domain");

  p.f = r.expr("problem.f", ExprSlot::data, true);
  p.phi = r.expr("problem.phi", ExprSlot::data, true);
  p.u0 = r.expr("problem.u0", ExprSlot::initial, true);
  p.exact = r.expr("problem.exact", ExprSlot::initial, false);

  if (r.has("problem.y0")) {
    const std::string s = r.str("problem.y0", "");
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw ConfigurationError("expected 'x, y'", "problem.y0");
    p.y0 = {Reader::parse_real("problem.y0", trim(std::string_view(s).substr(0, comma))),
            Reader::parse_real("problem.y0", trim(std::string_view(s).substr(comma + 1)))};
    if (!(distance(p.dom, p.y0) >= 0.0))
      throw ConfigurationError("y0 lies outside the domain", "problem.y0");
  }

  cfg.res.nr = static_cast<int>(r.integer("grid.nr", cfg.res.nr));
  cfg.res.ntheta = static_cast<int>(r.integer("grid.ntheta", cfg.res.ntheta));
  cfg.res.n = static_cast<int>(r.integer("grid.n", cfg.res.n));

  FlowOptions& f = cfg.flow;
  const std::string mode = r.str("flow.mode", "steady");
  if (mode == "steady") f.mode = FlowMode::steady;
  else if (mode == "translating") f.mode = FlowMode::translating;
  else throw ConfigurationError("expected steady or translating", "flow.mode");
  const std::string integ = r.str("flow.integrator", "implicit");
  if (integ == "implicit") f.integrator = Integrator::implicit_euler;
  else if (integ == "explicit") f.integrator = Integrator::explicit_euler;
  else throw ConfigurationError("expected implicit or explicit", "flow.integrator");
  f.cfl = positive("flow.cfl", f.cfl);
  f.dt_init = positive("flow.dt_init", f.dt_init);
  f.dt_max = positive("flow.dt_max", f.dt_max);
  f.dt_growth = positive("flow.dt_growth", f.dt_growth);
  f.tol_steady = positive("flow.tol_steady", f.tol_steady);
  f.tol_trans = positive("flow.tol_trans", f.tol_trans);
  f.window = static_cast<int>(r.integer("flow.window", f.window));
  f.t_max = positive("flow.t_max", f.t_max);
  f.max_steps = r.integer("flow.max_steps", f.max_steps);
  f.checkpoint_every = static_cast<int>(r.integer("flow.checkpoint_every", f.checkpoint_every));
  if (f.window < 2) throw ConfigurationError("must be at least 2", "flow.window");
  if (f.max_steps < 1) throw ConfigurationError("must be positive", "flow.max_steps");
  if (f.checkpoint_every < 1) throw ConfigurationError("must be positive", "flow.checkpoint_every");

  EllipticOptions& e = cfg.eigen;
  e.eps0 = positive("eigen.eps0", e.eps0);
  e.levels = static_cast<int>(r.integer("eigen.levels", e.levels));
  if (e.levels < 1) throw ConfigurationError("need at least 1", "eigen.levels");
  e.tol_steady = positive("eigen.tol", e.tol_steady);
  e.dt_init = positive("eigen.dt_init", e.dt_init);
  e.dt_max = positive("eigen.dt_max", e.dt_max);
  e.dt_growth = positive("eigen.growth", e.dt_growth);
  e.max_steps = r.integer("eigen.max_steps", e.max_steps);

  cfg.out_dir = r.str("output.dir", cfg.out_dir);
  return cfg;
}

RunConfig parse_config(std::string_view text) { return build_config(parse_entries(text)); }

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot open config file " + path.string(), "config");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Grid make_grid(const RunConfig& cfg, int factor) {
  GridResolution r = cfg.res;
  r.nr *= factor;
  r.ntheta *= factor;
  r.n = (r.n - 1) * factor + 1;
  try {
    return build_grid(cfg.problem.dom, r);
  } catch (const ArgumentError& e) {
    throw ConfigurationError(e.what(), cfg.problem.dom.kind() == DomainKind::square ? "grid.n"
                                                                                     : "grid.nr");
  }
}

}  // namespace hqflow::app
