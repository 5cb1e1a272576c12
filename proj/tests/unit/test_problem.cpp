#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <string>

#include "hqflow/errors.hpp"
#include "hqflow/problem.hpp"

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

Discretization disk_disc() {
  return Discretization(std::make_shared<const Grid>(build_grid(Domain::disk(1), {12, 24, 0})));
}

std::string field_of(const ProblemSpec& p, const Discretization& d) {
  try {
    (void)validate_problem(p, d);
  } catch (const ConfigurationError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST(ValidateProblem, AcceptsClassicalData) {
  const auto d = disk_disc();
  const auto rep = validate_problem(make("1", "1", "(x1^2+x2^2)/2"), d);
  EXPECT_DOUBLE_EQ(rep.min_f, 1.0);
  EXPECT_TRUE(std::isnan(rep.c_phi));
  EXPECT_FALSE(rep.growth_condition);
  EXPECT_FALSE(rep.outside_theory);
}

TEST(ValidateProblem, StructuralConstants) {
  const auto d = disk_disc();
  const auto rep = validate_problem(make("exp(u)", "1.5 - u", "(x1^2+x2^2)/2"), d);
  EXPECT_NEAR(rep.c_phi, -1.0, 1e-8);
  EXPECT_NEAR(rep.c_f, 1.0, 1e-8);
  EXPECT_TRUE(rep.growth_condition);
}

TEST(ValidateProblem, NamesOffendingField) {
  const auto d = disk_disc();
  EXPECT_EQ(field_of(make("x1", "1", "(x1^2+x2^2)/2"), d), "problem.f");
  EXPECT_EQ(field_of(make("exp(-u)", "1", "(x1^2+x2^2)/2"), d), "problem.f");
  EXPECT_EQ(field_of(make("1", "1 + 0.5*u", "(x1^2+x2^2)/2"), d), "problem.phi");
  EXPECT_EQ(field_of(make("1", "1", "-x1^2"), d), "problem.u0");
}

TEST(ValidateProblem, PositivePhiSlopeMessage) {
  const auto d = disk_disc();
  try {
    (void)validate_problem(make("1", "1 + 0.5*u", "(x1^2+x2^2)/2"), d);
    FAIL();
  } catch (const ConfigurationError& e) {
    EXPECT_NE(std::string(e.what()).find("phi_u <= c_phi < 0"), std::string::npos) << e.what();
  }
}

TEST(ValidateProblem, InadmissibleInitialDataNamesNode) {
  const auto d = disk_disc();
  try {
    (void)validate_problem(make("1", "1", "-x1^2"), d);
    FAIL();
  } catch (const ConfigurationError& e) {
    const std::string w = e.what();
    EXPECT_NE(w.find("node"), std::string::npos) << w;
    EXPECT_NE(w.find("sigma_1"), std::string::npos) << w;
  }
}

TEST(ValidateProblem, InitialSubsolutionFlag) {
  const auto d = disk_disc();
  // Laplacian of |x|^2 is 4 >= f = 1
  EXPECT_TRUE(validate_problem(make("1", "2", "x1^2+x2^2"), d).initial_subsolution);
  EXPECT_FALSE(validate_problem(make("8", "2", "x1^2+x2^2"), d).initial_subsolution);
}

TEST(ValidateProblem, SquareNeedsFlag) {
  ProblemSpec p = make("1", "1", "(x1^2+x2^2)/2");
  p.dom = Domain::square(1);
  const Discretization d(std::make_shared<const Grid>(build_grid(p.dom, {0, 0, 9})));
  EXPECT_EQ(field_of(p, d), "problem.domain");
  p.allow_nonsmooth = true;
  EXPECT_TRUE(validate_problem(p, d).outside_theory);
}

TEST(ProblemSpec, RegularizedLogF) {
  const ProblemSpec p = make("2 + x1^2", "1", "(x1^2+x2^2)/2").regularized(0.5, 0.25);
  EXPECT_NEAR(p.log_f({1, 0}, 2.0), std::log(3.0) + 0.25 + 1.0, 1e-15);
  EXPECT_NEAR(p.dlog_f_du({1, 0}, 2.0), 0.5, 1e-9);
}

TEST(ProblemSpec, PartialUOfData) {
  const ProblemSpec p = make("1 + u^2", "1 - u", "0");
  EXPECT_NEAR(partial_u(p.f, {0, 0, 1, 0}), 2.0, 1e-6);
  EXPECT_NEAR(partial_u(p.phi, {0.3, 0.1, 5, 0}), -1.0, 1e-9);
}

TEST(InitialState, ProjectsOntoBoundaryRelation) {
  const auto d = disk_disc();
  const ProblemSpec p = make("1", "1 - u", "(x1^2+x2^2)/2 + 0.1*x1");
  const GridFn u = initial_state(p, d);
  EXPECT_TRUE(u.boundary_closed());
  EXPECT_LE(neumann_residual(d, u, p.boundary_fn()), 1e-12);
  for (std::size_t i : d.grid().interior()) {
    const Point x = d.grid().node(i).x;
    EXPECT_DOUBLE_EQ(u[i], p.u0_at(x));
  }
}
