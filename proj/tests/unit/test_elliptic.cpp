#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <string>

#include "hqflow/elliptic.hpp"
#include "hqflow/errors.hpp"

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

Discretization disk_disc(int nr, int nt, double R = 1.0) {
  return Discretization(std::make_shared<const Grid>(build_grid(Domain::disk(R), {nr, nt, 0})));
}

const char* kLaplaceU0 = "(x1^2+x2^2)/2 + 0.05*x1*(x1^2+x2^2-3) + 0.1*x1*x2*(x1^2+x2^2-2)";

}  // namespace

TEST(SEpsilon, Formula) {
  const auto d = disk_disc(8, 16);
  const GridFn a(d.grid_ptr(), 1.0), b(d.grid_ptr(), 0.6);
  EXPECT_NEAR(s_epsilon(a, b, 0.5, {0, 0}), 0.2, 1e-15);
  EXPECT_DOUBLE_EQ(s_epsilon(a, a, 0.5, {0.1, 0.2}), 0.0);
}

TEST(LaplaceSpeedOracle, DivergenceTheorem) {
  EXPECT_NEAR(laplace_speed_oracle(make("1", "1", "0")), std::log(2.0), 1e-10);
  ProblemSpec r2 = make("1", "1", "0");
  r2.dom = Domain::disk(2);
  EXPECT_NEAR(laplace_speed_oracle(r2), 0.0, 1e-10);
  ProblemSpec sq = make("1", "1", "0");
  sq.dom = Domain::square(1);
  sq.allow_nonsmooth = true;
  EXPECT_NEAR(laplace_speed_oracle(sq), std::log(2.0), 1e-12);
}

TEST(LaplaceSpeedOracle, RejectsOtherOrdersAndBadData) {
  EXPECT_THROW((void)laplace_speed_oracle(make("1", "1", "0", 2, 0)), ArgumentError);
  EXPECT_THROW((void)laplace_speed_oracle(make("1", "1 - u", "0")), ArgumentError);
  EXPECT_THROW((void)laplace_speed_oracle(make("1", "-1", "0")), ArgumentError);
}

TEST(Uniqueness, ConstantShift) {
  const auto d = disk_disc(8, 16);
  const GridFn a = GridFn::sample(d.grid_ptr(), [](Point x) { return std::sin(x.x) + x.y; });
  const GridFn b = GridFn::sample(d.grid_ptr(), [](Point x) { return std::sin(x.x) + x.y + 5; });
  EXPECT_LE(check_uniqueness_up_to_constant(a, b), 1e-14);
  EXPECT_DOUBLE_EQ(check_uniqueness_up_to_constant(a, a), 0.0);
}

TEST(SolveRegularized, PlugBackLaplaceExp) {
  const auto d = disk_disc(12, 24);
  const ProblemSpec p = make("1", "1", kLaplaceU0);
  const RunResult res = solve_regularized(d, p, 1.0, regularized_flow_options({}));
  const GridFn u = solution(res.state);
  const auto hs = hessian(d, u);
  double r = 0.0;
  for (std::size_t i : d.grid().interior()) r = std::max(r, std::abs(std::log(hs[i].trace()) - u[i]));
  EXPECT_LE(r, 1e-6);
}

TEST(SolveRegularized, DecayRateScalesWithEps) {
  const auto d = disk_disc(12, 24);
  const ProblemSpec p = make("1", "1", kLaplaceU0);
  FlowOptions opt;
  opt.dt_max = 0.005;
  const RunResult r1 = run(d, p.regularized(1.0, 0.0), opt);
  const RunResult r10 = run(d, p.regularized(10.0, 0.0), opt);
  ASSERT_EQ(r1.status, RunStatus::converged);
  ASSERT_EQ(r10.status, RunStatus::converged);
  EXPECT_GE(r10.decay_rate, 8.0);
  EXPECT_NEAR(r1.decay_rate, 1.0, 0.1);
}

TEST(SolveRegularized, ManufacturedSolutionSecondOrder) {
  // u* = |x|^2/2 + 0.05 x1^3, det D^2 u* = 1 + 0.3 x1, eps = 0.5; the u0 bump
  // vanishes with its normal derivative on the unit circle
  const ProblemSpec p = make("(1 + 0.3*x1) * exp(-0.5*((x1^2+x2^2)/2 + 0.05*x1^3))",
                             "x1^2 + x2^2 + 0.15*x1^3",
                             "(x1^2+x2^2)/2 + 0.05*x1^3 + 0.1*(1-x1^2-x2^2)^2", 2, 0);
  auto err = [&](int nr) {
    const auto d = disk_disc(nr, 2 * nr);
    const RunResult res = solve_regularized(d, p, 0.5, regularized_flow_options({}));
    const GridFn u = solution(res.state);
    double e = 0.0;
    for (std::size_t i = 0; i < d.grid().size(); ++i) {
      const Point x = d.grid().node(i).x;
      e = std::max(e, std::abs(u[i] - ((x.x * x.x + x.y * x.y) / 2 + 0.05 * x.x * x.x * x.x)));
    }
    return e;
  };
  const double e1 = err(12), e2 = err(24);
  EXPECT_LE(e2, 1e-2);
  EXPECT_GE(std::log2(e1 / e2), 1.5);
}

TEST(SpeedBound, Formula) {
  const auto d = disk_disc(12, 24);
  EXPECT_NEAR(speed_bound(d, make("1", "1", "(x1^2+x2^2)/2")), 1.5 + std::log(2.0), 1e-2);
}

TEST(SolveEigenpair, LaplaceSpeed) {
  const auto d = disk_disc(16, 32);
  const ProblemSpec p = make("1", "1", kLaplaceU0);
  const EigenPair ep = solve_eigenpair(d, p);
  EXPECT_EQ(ep.status, EigenStatus::ok) << ep.message;
  ASSERT_TRUE(ep.oracle_s.has_value());
  EXPECT_NEAR(*ep.oracle_s, std::log(2.0), 1e-10);
  EXPECT_NEAR(ep.s, std::log(2.0), 1e-2);
  EXPECT_EQ(ep.epsilon_trace.size(), 7u);
  EXPECT_TRUE(ep.trace_in_bounds);
  EXPECT_NEAR(ep.u_ell.interpolate(ep.y0), initial_state(p, d).interpolate(ep.y0), 1e-12);
  const double h = d.grid().h_max();
  EXPECT_LE(ep.residual, 10 * h * h * (1 + std::abs(ep.s)));
}

TEST(SolveEigenpair, ScalingFShiftsSpeed) {
  const auto d = disk_disc(12, 24);
  const EigenPair a = solve_eigenpair(d, make("1 + 0.2*x1^2", "1", kLaplaceU0));
  const EigenPair b = solve_eigenpair(d, make("2*(1 + 0.2*x1^2)", "1", kLaplaceU0));
  EXPECT_NEAR(b.s - a.s, -std::log(2.0), 1e-6);
}

TEST(TranslationIdentity, HoldsForUnitShift) {
  const auto d = disk_disc(12, 24);
  const ProblemSpec p = make("1", "1", kLaplaceU0);
  EXPECT_LE(translation_identity_error(d, p, 0.5, 1.0), 10 * 1e-8 / 0.5);
}
