#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "config.hpp"
#include "hqflow/errors.hpp"
#include "hqflow/flow.hpp"

using namespace hqflow;

namespace {

ProblemSpec make(const std::string& f, const std::string& phi, const std::string& u0, int k = 1,
                 int l = 0) {
  ProblemSpec p;
  p.q = {k, l, 2};
  p.f = parse_expr(f, ExprSlot::data);
  p.phi = parse_expr(phi, ExprSlot::data);
  p.u0 = parse_expr(u0, ExprSlot::initial);
  return p;
}

Discretization disk_disc(int nr, int nt) {
  return Discretization(std::make_shared<const Grid>(build_grid(Domain::disk(1), {nr, nt, 0})));
}

Discretization square_disc(int n) {
  return Discretization(std::make_shared<const Grid>(build_grid(Domain::square(1), {0, 0, n})));
}

FlowState state_of(const GridFn& u) {
  FlowState s;
  s.u = u;
  return s;
}

}  // namespace

TEST(Rhs, LaplaceOfHalfNormSquared) {
  const auto d = disk_disc(12, 24);
  const ProblemSpec p = make("1", "1", "(x1^2+x2^2)/2");
  const GridFn ut = rhs(d, p, initial_state(p, d));
  for (std::size_t i : d.grid().interior()) EXPECT_NEAR(ut[i], std::log(2.0), 1e-9);
}

TEST(Rhs, ManufacturedPairCancelsToSecondOrder) {
  const app::RunConfig cfg = app::load_config(HQFLOW_CONFIG_DIR "/manufactured_k2.cfg");
  auto residual = [&](int factor) {
    const Discretization d(std::make_shared<const Grid>(app::make_grid(cfg, factor)));
    const GridFn u = GridFn::sample(d.grid_ptr(), [&](Point x) {
      return cfg.problem.exact.eval({x.x, x.y, 0, 0});
    });
    const GridFn ut = rhs(d, cfg.problem, u);
    double m = 0.0;
    for (std::size_t i : d.grid().interior()) m = std::max(m, std::abs(ut[i]));
    return m;
  };
  const double r1 = residual(1), r2 = residual(2);
  EXPECT_LE(r2, 1e-2);
  EXPECT_GE(std::log2(r1 / r2), 1.5);
}

TEST(Rhs, MatchesEigenDecompositionRecomputation) {
  const auto d = disk_disc(12, 24);
  for (const auto& [k, l] : {std::pair{1, 0}, std::pair{2, 0}, std::pair{2, 1}}) {
    const ProblemSpec p =
        make("1 + 0.3*x1^2 + 0.1*exp(u)", "1", "(x1^2+x2^2)/2 + 0.1*x1^3 + 0.05*sin(x2)", k, l);
    const GridFn u = GridFn::sample(d.grid_ptr(), [&](Point x) { return p.u0_at(x); });
    const GridFn ut = rhs(d, p, u);
    const auto hs = hessian(d, u);
    for (std::size_t i : d.grid().interior()) {
      const auto eig = eigen_sym(hs[i]);
      const double q = sigma(eig.values, k) / sigma(eig.values, l);
      const Point x = d.grid().node(i).x;
      const double f = 1 + 0.3 * x.x * x.x + 0.1 * std::exp(u[i]);
      EXPECT_NEAR(ut[i], std::log(q) - std::log(f), 1e-10);
    }
  }
}

TEST(Rhs, InadmissibleNodeThrows) {
  const auto d = disk_disc(8, 16);
  const ProblemSpec p = make("1", "1", "(x1^2+x2^2)/2");
  const GridFn u = GridFn::sample(d.grid_ptr(), [](Point x) { return -x.x * x.x; });
  try {
    (void)rhs(d, p, u);
    FAIL();
  } catch (const AdmissibilityError& e) {
    EXPECT_GE(e.node(), 0);
    EXPECT_EQ(e.failing_order(), 1);
  }
}

TEST(SelectDt, ClosedFormForLaplace) {
  ProblemSpec p = make("1", "1", "(x1^2+x2^2)/2");
  p.dom = Domain::square(1);
  p.allow_nonsmooth = true;
  const auto d17 = square_disc(17);
  const auto d33 = square_disc(33);
  const auto u17 = GridFn::sample(d17.grid_ptr(), [](Point x) { return (x.x * x.x + x.y * x.y) / 2; });
  const auto u33 = GridFn::sample(d33.grid_ptr(), [](Point x) { return (x.x * x.x + x.y * x.y) / 2; });
  const OperatorEval ev = evaluate_operator(d17, p, u17);
  EXPECT_NEAR(ev.g_max, 0.5, 1e-12);
  for (std::size_t i : d17.grid().interior()) {
    EXPECT_NEAR(ev.F[i][0], 0.5, 1e-12);
    EXPECT_NEAR(ev.F[i][1], 0.0, 1e-12);
    EXPECT_NEAR(ev.F[i][2], 0.5, 1e-12);
  }
  const double h = d17.grid().h_min();
  const double dt17 = select_dt(d17, p, state_of(u17));
  EXPECT_NEAR(dt17, 0.4 * h * h / 2, 1e-15);
  EXPECT_NEAR(dt17 / select_dt(d33, p, state_of(u33)), 4.0, 1e-9);
}

TEST(SelectDt, AnisotropicSpectralRadius) {
  ProblemSpec p = make("1", "1", "(10*x1^2 + 0.1*x2^2)/2", 2, 0);
  p.dom = Domain::square(1);
  p.allow_nonsmooth = true;
  const auto d = square_disc(17);
  const auto u = GridFn::sample(d.grid_ptr(), [](Point x) { return (10 * x.x * x.x + 0.1 * x.y * x.y) / 2; });
  // F = diag(1/10, 1/0.1) for log(uxx uyy)
  const OperatorEval ev = evaluate_operator(d, p, u);
  EXPECT_NEAR(ev.g_max, 10.0, 1e-9);
  const double h = d.grid().h_min();
  EXPECT_NEAR(select_dt(d, p, state_of(u)), 0.4 * h * h / (2 * 2 * 10.0), 1e-15);
}

TEST(Step, ExplicitStepRaisesInteriorByDtLog2) {
  const auto d = disk_disc(12, 24);
  const ProblemSpec p = make("1", "1", "(x1^2+x2^2)/2");
  FlowOptions opt;
  opt.integrator = Integrator::explicit_euler;
  const FlowState s0 = state_of(initial_state(p, d));
  const FlowState s1 = step(d, p, s0, opt);
  const double dt = s1.t - s0.t;
  EXPECT_GT(dt, 0.0);
  EXPECT_NEAR(dt, select_dt(d, p, s0, opt.cfl), 1e-15);
  const GridFn a = solution(s0), b = solution(s1);
  for (std::size_t i : d.grid().interior()) EXPECT_NEAR(b[i] - a[i], dt * std::log(2.0), 1e-12);
}

TEST(Step, ImplicitStepOfStationaryDataIsSmall) {
  const app::RunConfig cfg = app::load_config(HQFLOW_CONFIG_DIR "/manufactured_k2.cfg");
  const Discretization d(std::make_shared<const Grid>(app::make_grid(cfg)));
  GridFn u = GridFn::sample(d.grid_ptr(), [&](Point x) { return cfg.problem.exact.eval({x.x, x.y, 0, 0}); });
  u = apply_neumann(d, u, cfg.problem.boundary_fn());
  FlowState s0 = state_of(u);
  s0.dt = 0.01;
  const FlowState s1 = step(d, cfg.problem, s0, cfg.flow);
  const GridFn ut = rhs(d, cfg.problem, u);
  double r = 0.0, change = 0.0;
  for (std::size_t i : d.grid().interior()) {
    r = std::max(r, std::abs(ut[i]));
    change = std::max(change, std::abs(s1.u[i] - s0.u[i]));
  }
  EXPECT_LE(change, (s1.t - s0.t) * r * 1.5 + 1e-14);
}

TEST(Run, TranslatingLaplaceSpeedIsLog2) {
  const auto d = disk_disc(16, 32);
  const ProblemSpec p = make("1", "1",
                             "(x1^2+x2^2)/2 + 0.05*x1*(x1^2+x2^2-3) + 0.1*x1*x2*(x1^2+x2^2-2)");
  FlowOptions opt;
  opt.mode = FlowMode::translating;
  opt.tol_trans = 1e-7;
  opt.checkpoint_every = 10;
  const RunResult res = run(d, p, opt);
  ASSERT_EQ(res.status, RunStatus::converged) << res.message;
  EXPECT_NEAR(res.speed, std::log(2.0), 1e-2);
  const MonitorChecks c = check_monitors(res, opt);
  EXPECT_TRUE(c.ut_max_principle);
  EXPECT_TRUE(c.checkpoints_nonincreasing);
  EXPECT_FALSE(res.bounds.M0.has_value());
}

TEST(Run, SteadyManufacturedDecayAndBounds) {
  const app::RunConfig cfg = app::load_config(HQFLOW_CONFIG_DIR "/manufactured_k2.cfg");
  const Discretization d(std::make_shared<const Grid>(app::make_grid(cfg)));
  const RunResult res = run(d, cfg.problem, cfg.flow);
  ASSERT_EQ(res.status, RunStatus::converged) << res.message;
  EXPECT_GE(res.decay_rate, 0.8);
  ASSERT_TRUE(res.bounds.M0.has_value());
  ASSERT_TRUE(res.bounds.c2.has_value());
  EXPECT_GT(*res.bounds.c2, 0.0);
  for (const auto& r : res.records) EXPECT_GE(r.min_quotient, *res.bounds.c2 - 1e-6);
  const MonitorChecks c = check_monitors(res, cfg.flow);
  EXPECT_TRUE(c.all());
}

TEST(Run, SubsolutionStartKeepsUtNonnegative) {
  const auto d = disk_disc(12, 24);
  // Laplacian 4 > f = 1 and u_nu = 2 = phi on the unit circle
  const ProblemSpec p = make("1", "2", "x1^2 + x2^2");
  FlowOptions opt;
  opt.mode = FlowMode::translating;
  opt.tol_trans = 1e-7;
  const RunResult res = run(d, p, opt);
  EXPECT_TRUE(res.structure.initial_subsolution);
  for (const auto& r : res.records) EXPECT_GE(r.min_ut, -1e-6);
  EXPECT_NEAR(res.speed, std::log(4.0), 1e-2);
}

TEST(FitDecayRate, RecoversExponent) {
  std::vector<MonitorRecord> recs;
  for (int i = 0; i <= 100; ++i) {
    MonitorRecord r;
    r.t = 0.05 * i;
    r.max_ut = 3 * std::exp(-2 * r.t);
    r.min_ut = -r.max_ut / 2;
    recs.push_back(r);
  }
  EXPECT_NEAR(fit_decay_rate(recs), 2.0, 1e-10);
}
