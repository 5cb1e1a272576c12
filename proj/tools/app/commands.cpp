#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <memory>
#include <set>

#include <CLI11.hpp>

#include "config.hpp"
#include "hqflow/elliptic.hpp"
#include "hqflow/errors.hpp"
#include "hqflow/flow.hpp"
#include "hqflow/verify.hpp"
#include "output.hpp"

namespace hqflow::app {

namespace {

namespace fs = std::filesystem;

std::ostream& log_of(const CommandContext& ctx) {
  static std::ostream null_stream(nullptr);
  return ctx.log ? *ctx.log : null_stream;
}

fs::path out_dir(const CommandContext& ctx, const std::string& configured) {
  return ctx.out_override ? *ctx.out_override : fs::path(configured);
}

// Maps library exceptions onto exit codes.
int guarded(const CommandContext& ctx, const std::function<int()>& body) {
  std::ostream& log = log_of(ctx);
  try {
    return body();
  } catch (const ConfigurationError& e) {
    log << "configuration error";
    if (!e.field().empty()) log << " [" << e.field() << "]";
    log << ": " << e.what() << "\n";
    return exit_config;
  } catch (const AdmissibilityError& e) {
    log << "configuration error: " << e.what() << "\n";
    return exit_config;
  } catch (const ArgumentError& e) {
    log << "argument error: " << e.what() << "\n";
    return exit_config;
  } catch (const DivergenceError& e) {
    log << "divergence: " << e.what() << "\n";
    return exit_diverged;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return exit_failed;
  }
}

int exit_for(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return exit_ok;
    case RunStatus::diverged: return exit_diverged;
    case RunStatus::t_max: return exit_t_max;
  }
  return exit_failed;
}

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// max|u - exact| for steady runs, osc(u - exact) for translating ones.
std::optional<double> exact_error(const RunConfig& cfg, const GridFn& u) {
  if (cfg.problem.exact.empty()) return std::nullopt;
  const Grid& g = u.grid();
  std::vector<double> d(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point p = g.node(i).x;
    d[i] = u[i] - cfg.problem.exact.eval({p.x, p.y, 0.0, 0.0});
  }
  if (cfg.flow.mode == FlowMode::translating) return oscillation(d);
  double e = 0.0;
  for (double x : d) e = std::max(e, std::abs(x));
  return e;
}

std::string monitors_csv(const Meta& m, const RunResult& res) {
  std::string s = meta_comment(m);
  s += "t,max_ut,min_ut,min_u,max_u,sup_grad,sup_hess,min_quotient,osc,status\n";
  for (const auto& r : res.records) {
    s += fmt(r.t) + "," + fmt(r.max_ut) + "," + fmt(r.min_ut) + "," + fmt(r.min_u) + "," +
         fmt(r.max_u) + "," + fmt(r.sup_grad) + "," + fmt(r.sup_hess) + "," +
         fmt(r.min_quotient) + "," + fmt(r.osc) + "," +
         (r.admissible ? "admissible" : "inadmissible") + "\n";
  }
  return s;
}

Json flow_summary(const Meta& m, const RunConfig& cfg, const RunResult& res) {
  Json j;
  j["meta"] = meta_json(m);
  j["status"] = to_string(res.status);
  j["message"] = res.message;
  j["mode"] = to_string(cfg.flow.mode);
  j["steps"] = res.state.step_count;
  j["t"] = res.state.t;
  const auto& last = res.records.back();
  j["final_max_abs_ut"] = std::max(std::abs(last.max_ut), std::abs(last.min_ut));
  j["final_osc_ut"] = last.osc;
  j["decay_rate"] = res.decay_rate;
  j["speed"] = res.speed;
  j["c37"] = res.c37;
  j["exact_error"] = opt_json(exact_error(cfg, solution(res.state)));

  Json st;
  st["min_f"] = res.structure.min_f;
  st["c_phi"] = res.structure.c_phi;
  st["c_f"] = res.structure.c_f;
  st["growth_condition"] = res.structure.growth_condition;
  st["initial_subsolution"] = res.structure.initial_subsolution;
  st["initial_neumann_residual"] = res.structure.initial_neumann_residual;
  j["structure"] = st;

  Json b;
  b["max_ut0"] = res.bounds.max_ut0;
  b["min_ut0"] = res.bounds.min_ut0;
  b["M0"] = opt_json(res.bounds.M0);
  b["c2"] = opt_json(res.bounds.c2);
  j["bounds"] = b;

  const MonitorChecks c = check_monitors(res, cfg.flow);
  Json ch;
  ch["tol"] = c.tol_mp;
  ch["ut_max_principle"] = c.ut_max_principle;
  ch["ut_decay"] = c.ut_decay;
  ch["c0_bound"] = c.c0_bound;
  ch["quotient_floor"] = c.quotient_floor;
  ch["derivatives_bounded"] = c.derivatives_bounded;
  ch["checkpoints_nonincreasing"] = c.checkpoints_nonincreasing;
  ch["worst_ut_excess"] = c.worst_ut_excess;
  ch["worst_c0_excess"] = c.worst_c0_excess;
  ch["worst_floor_excess"] = c.worst_floor_excess;
  ch["worst_checkpoint_increase"] = c.worst_checkpoint_increase;
  ch["all"] = c.all();
  j["checks"] = ch;

  Json cps = Json::array();
  for (const auto& cp : res.checkpoints) {
    Json e;
    e["t"] = cp.t;
    e["step"] = cp.step;
    e["osc_ut"] = cp.osc_ut;
    cps.push_back(e);
  }
  j["checkpoints"] = cps;
  return j;
}

}  // namespace

int cmd_flow(const fs::path& config, const CommandContext& ctx) {
  return guarded(ctx, [&] {
    std::ostream& log = log_of(ctx);
    const RunConfig cfg = load_config(config);
    auto grid = std::make_shared<const Grid>(make_grid(cfg));
    const Discretization disc(grid);
    const Meta meta = make_meta("flow", cfg, *grid);
    log << "flow: " << grid->describe() << ", k = " << cfg.problem.q.k
        << ", l = " << cfg.problem.q.l << "\n";
    const RunResult res = run(disc, cfg.problem, cfg.flow);
    const fs::path dir = out_dir(ctx, cfg.out_dir);
    write_file(dir / "monitors.csv", monitors_csv(meta, res));
    write_file(dir / "final.csv", snapshot_csv(meta, solution(res.state)));
    write_file(dir / "summary.json", dump_json(flow_summary(meta, cfg, res)));
    log << "flow: " << to_string(res.status) << " after " << res.state.step_count
        << " steps, t = " << res.state.t << ", speed = " << res.speed
        << ", decay rate = " << res.decay_rate << "\n";
    if (!res.message.empty()) log << "flow: " << res.message << "\n";
    return exit_for(res.status);
  });
}

int cmd_eigen(const fs::path& config, const CommandContext& ctx) {
  return guarded(ctx, [&] {
    std::ostream& log = log_of(ctx);
    const RunConfig cfg = load_config(config);
    auto grid = std::make_shared<const Grid>(make_grid(cfg));
    const Discretization disc(grid);
    const Meta meta = make_meta("eigen", cfg, *grid);
    log << "eigen: " << grid->describe() << ", eps0 = " << cfg.eigen.eps0
        << ", levels = " << cfg.eigen.levels << "\n";
    (void)validate_problem(cfg.problem, disc);
    const EigenPair ep = solve_eigenpair(disc, cfg.problem, cfg.eigen);

    Json j;
    j["meta"] = meta_json(meta);
    j["s_hat"] = ep.s;
    Json trace = Json::array();
    for (const auto& [eps, s] : ep.epsilon_trace) trace.push_back(Json::array({eps, s}));
    j["epsilon_trace"] = trace;
    j["residual"] = ep.residual;
    j["oracle_s"] = opt_json(ep.oracle_s);
    j["status"] = to_string(ep.status);
    j["difference_ratios"] = ep.difference_ratios;
    j["M"] = ep.M;
    j["trace_in_bounds"] = ep.trace_in_bounds;
    j["y0"] = Json::array({ep.y0.x, ep.y0.y});
    j["h"] = grid->h_max();
    j["message"] = ep.message;

    const fs::path dir = out_dir(ctx, cfg.out_dir);
    write_file(dir / "summary.json", dump_json(j));
    if (ep.status != EigenStatus::diverged) write_file(dir / "profile.csv", snapshot_csv(meta, ep.u_ell));
    log << "eigen: " << to_string(ep.status) << ", s_hat = " << fmt(ep.s)
        << ", residual = " << ep.residual << "\n";
    if (!ep.message.empty()) log << "eigen: " << ep.message << "\n";
    switch (ep.status) {
      case EigenStatus::ok: return int(exit_ok);
      case EigenStatus::diverged: return int(exit_diverged);
      case EigenStatus::non_cauchy:
      case EigenStatus::non_monotone: return int(exit_non_cauchy);
    }
    return int(exit_failed);
  });
}

int cmd_verify(std::uint64_t seed, long trials, bool inject_fault, const CommandContext& ctx) {
  return guarded(ctx, [&] {
    std::ostream& log = log_of(ctx);
    VerifyOptions opt;
    opt.seed = seed;
    opt.trials = trials;
    opt.inject_fault = inject_fault;
    const VerifyReport rep = run_verify(opt);

    Meta meta;
    meta.command = "verify";
    meta.config_hash = fnv1a("seed=" + std::to_string(seed) + ";trials=" + std::to_string(trials) +
                             ";inject_fault=" + (inject_fault ? "1" : "0"));
    Json j;
    j["meta"] = meta_json(meta);
    j["seed"] = seed;
    j["trials"] = trials;
    j["inject_fault"] = inject_fault;
    j["passed"] = rep.passed();
    Json props = Json::array();
    for (const auto& p : rep.properties) {
      Json e;
      e["name"] = p.name;
      e["kind"] = p.kind;
      e["trials"] = p.trials;
      e["passed"] = p.passed;
      e["worst_margin"] = p.worst_margin;
      e["tolerance"] = p.tolerance;
      props.push_back(e);
      log << (p.ok() ? "PASS " : "FAIL ") << p.name << ": " << p.passed << "/" << p.trials
          << ", worst margin " << fmt(p.worst_margin) << "\n";
    }
    j["properties"] = props;
    j["warnings"] = rep.warnings;
    for (const auto& w : rep.warnings) log << "warning: " << w << "\n";
    write_file(out_dir(ctx, "hqflow_out") / "verify.json", dump_json(j));
    return rep.passed() ? int(exit_ok) : int(exit_failed);
  });
}

std::vector<int> parse_levels(const std::string& spec) {
  std::vector<int> out;
  if (spec.find(',') == std::string::npos) {
    int n = 0;
    const auto [p, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), n);
    if (ec != std::errc() || p != spec.data() + spec.size() || n < 2 || n > 6)
      throw ArgumentError("--levels: expected a count in 2..6 or a list of factors");
    for (int i = 0; i < n; ++i) out.push_back(1 << i);
    return out;
  }
  std::set<int> seen;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto next = std::min(spec.find(',', pos), spec.size());
    int f = 0;
    const auto [p, ec] = std::from_chars(spec.data() + pos, spec.data() + next, f);
    if (ec != std::errc() || p != spec.data() + next || f < 1)
      throw ArgumentError("--levels: bad factor in '" + spec + "'");
    if (!seen.insert(f).second)
      throw ArgumentError("--levels: level factor " + std::to_string(f) + " requested twice");
    out.push_back(f);
    pos = next + 1;
  }
  if (out.size() < 2) throw ArgumentError("--levels: need at least two levels");
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_converge(const fs::path& config, const std::vector<int>& factors,
                 const CommandContext& ctx) {
  return guarded(ctx, [&] {
    std::ostream& log = log_of(ctx);
    {
      std::set<int> s(factors.begin(), factors.end());
      if (s.size() != factors.size()) throw ArgumentError("converge: repeated grid level");
      if (factors.size() < 2) throw ArgumentError("converge: need at least two levels");
    }
    const RunConfig cfg = load_config(config);
    if (cfg.problem.exact.empty())
      throw ConfigurationError("converge needs a manufactured solution", "problem.exact");
    const Grid base = make_grid(cfg, factors.front());
    Meta meta = make_meta("converge", cfg, base);

    Json levels = Json::array();
    std::vector<double> hs, errs;
    int code = exit_ok;
    for (int f : factors) {
      auto grid = std::make_shared<const Grid>(make_grid(cfg, f));
      const Discretization disc(grid);
      const RunResult res = run(disc, cfg.problem, cfg.flow);
      const double err = exact_error(cfg, solution(res.state)).value();
      Json e;
      e["factor"] = f;
      e["grid"] = grid->describe();
      e["h"] = grid->h_max();
      e["status"] = to_string(res.status);
      e["steps"] = res.state.step_count;
      e["error_inf"] = err;
      e["decay_rate"] = res.decay_rate;
      e["checks"] = check_monitors(res, cfg.flow).all();
      levels.push_back(e);
      log << "converge: " << grid->describe() << " h = " << grid->h_max() << " error = " << err
          << " (" << to_string(res.status) << ")\n";
      if (res.status != RunStatus::converged && code == exit_ok) code = exit_for(res.status);
      hs.push_back(grid->h_max());
      errs.push_back(err);
    }
    Json orders = Json::array();
    bool in_range = true;
    for (std::size_t i = 0; i + 1 < hs.size(); ++i) {
      const double p = std::log(errs[i] / errs[i + 1]) / std::log(hs[i] / hs[i + 1]);
      orders.push_back(p);
      if (!(p >= 1.5 && p <= 2.5)) in_range = false;
      log << "converge: observed order " << p << "\n";
    }
    Json j;
    j["meta"] = meta_json(meta);
    j["levels"] = levels;
    j["orders"] = orders;
    j["orders_in_range"] = in_range;
    write_file(out_dir(ctx, cfg.out_dir) / "converge.json", dump_json(j));
    if (code != exit_ok) return code;
    return in_range ? int(exit_ok) : int(exit_failed);
  });
}

int run_cli(int argc, char** argv) {
  CLI::App app{"hqflow: parabolic Hessian quotient flows with Neumann data"};
  app.require_subcommand(1);

  std::string flow_cfg, eigen_cfg, conv_cfg, levels = "3";
  std::uint64_t seed = 42;
  long trials = 10'000;
  bool fault = false;

  auto* flow = app.add_subcommand("flow", "run the flow to its stop rule");
  flow->add_option("config", flow_cfg, "config file")->required();
  auto* eigen = app.add_subcommand("eigen", "solve the eigen-problem by the eps scheme");
  eigen->add_option("config", eigen_cfg, "config file")->required();
  auto* verify = app.add_subcommand("verify", "randomized symmetric-function property suite");
  verify->add_option("--seed", seed, "RNG seed");
  verify->add_option("--trials", trials, "trials per property")->check(CLI::NonNegativeNumber);
  verify->add_flag("--inject-fault", fault, "route sigma through a sign-bugged shadow");
  auto* conv = app.add_subcommand("converge", "grid-refinement study against problem.exact");
  conv->add_option("config", conv_cfg, "config file")->required();
  conv->add_option("--levels", levels, "level count or comma-separated refinement factors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : int(exit_config);
  }

  CommandContext ctx;
  ctx.log = &std::cerr;
  if (const char* env = std::getenv("HQFLOW_OUT"); env && *env) ctx.out_override = env;

  if (*flow) return cmd_flow(flow_cfg, ctx);
  if (*eigen) return cmd_eigen(eigen_cfg, ctx);
  if (*verify) return cmd_verify(seed, trials, fault, ctx);
  std::vector<int> factors;
  try {
    factors = parse_levels(levels);
  } catch (const ArgumentError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return exit_config;
  }
  return cmd_converge(conv_cfg, factors, ctx);
}

}  // namespace hqflow::app
