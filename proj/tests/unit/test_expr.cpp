#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <string>

#include "hqflow/expr.hpp"

using namespace hqflow;

TEST(Parse, Examples) {
  EXPECT_DOUBLE_EQ(parse_expr("x1^2 + x2^2").eval({1, 2, 0, 0}), 5.0);
  EXPECT_DOUBLE_EQ(parse_expr("2*exp(u) ").eval({0, 0, 0, 0}), 2.0);
}

TEST(Parse, UnbalancedParenOffset) {
  try {
    (void)parse_expr("log(x1");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 7u);
  }
}

TEST(Parse, UnknownIdentifier) {
  try {
    (void)parse_expr("1 + foo");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 5u);
  }
}

TEST(Parse, SlotRestrictions) {
  EXPECT_THROW((void)parse_expr("x1 + u", ExprSlot::initial), ParseError);
  EXPECT_THROW((void)parse_expr("t", ExprSlot::data), ParseError);
  EXPECT_NO_THROW((void)parse_expr("x1 + u", ExprSlot::data));
}

TEST(Parse, Precedence) {
  EXPECT_DOUBLE_EQ(parse_expr("2+3*4^2").eval({}), 50.0);
  EXPECT_DOUBLE_EQ(parse_expr("-2^2").eval({}), -4.0);
  EXPECT_DOUBLE_EQ(parse_expr("2^3^2").eval({}), 512.0);
  EXPECT_DOUBLE_EQ(parse_expr("2^-1").eval({}), 0.5);
  EXPECT_DOUBLE_EQ(parse_expr("8/4/2").eval({}), 1.0);
  EXPECT_NEAR(parse_expr("pi + e").eval({}), std::numbers::pi + std::numbers::e, 1e-15);
}

TEST(Eval, UnicodeMinus) {
  EXPECT_DOUBLE_EQ(parse_expr("−x1").eval({3, 0, 0, 0}), -3.0);
}

TEST(Eval, DomainErrors) {
  const Expr div = parse_expr("x1/x2");
  EXPECT_THROW((void)div.eval({1, 0, 0, 0}), EvalDomainError);
  EXPECT_THROW((void)parse_expr("log(x1)").eval({-1, 0, 0, 0}), EvalDomainError);
  EXPECT_THROW((void)parse_expr("sqrt(x1)").eval({-1, 0, 0, 0}), EvalDomainError);
  try {
    (void)parse_expr("sqrt(x1)").eval({-2, 0, 0, 0});
  } catch (const EvalDomainError& e) {
    EXPECT_NE(std::string(e.what()).find("sqrt"), std::string::npos);
  }
}

TEST(Eval, PythagoreanSweep) {
  const Expr e = parse_expr("sin(x1)^2 + cos(x1)^2");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-10, 10);
  for (int i = 0; i < 200; ++i) EXPECT_NEAR(e.eval({d(rng), 0, 0, 0}), 1.0, 1e-12);
}

TEST(Eval, Deterministic) {
  const Expr e = parse_expr("tanh(x1)*exp(u) - abs(x2)/3");
  const ExprEnv env{0.3, -0.7, 0.2, 0};
  const double a = e.eval(env);
  const double b = e.eval(env);
  EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
}

TEST(PartialU, Examples) {
  EXPECT_NEAR(partial_u(parse_expr("1 - u"), {0, 0, 0.4, 0}), -1.0, 1e-9);
  const Expr f = parse_expr("exp(u)");
  const ExprEnv env{0, 0, 0.7, 0};
  EXPECT_NEAR(partial_u(f, env) / f.eval(env), 1.0, 1e-9);
  EXPECT_NEAR(partial_u(parse_expr("1 + u^2"), {0, 0, 1, 0}), 2.0, 1e-6);
}

TEST(References, Variables) {
  const Expr e = parse_expr("x1 * exp(u)");
  EXPECT_TRUE(e.references(Var::x1));
  EXPECT_TRUE(e.references(Var::u));
  EXPECT_FALSE(e.references(Var::x2));
}

namespace {

std::string random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  const int c = depth <= 0 ? pick(rng) % 3 : pick(rng);
  static const char* vars[] = {"x1", "x2", "u", "t"};
  static const char* fns[] = {"sin", "cos", "exp", "log", "sqrt", "abs", "tanh"};
  switch (c) {
    case 0: return std::to_string(std::uniform_real_distribution<double>(0, 5)(rng));
    case 1: return vars[pick(rng) % 4];
    case 2: return "pi";
    case 3: return "-" + random_expr(rng, depth - 1);
    case 4: return std::string(fns[pick(rng) % 7]) + "(" + random_expr(rng, depth - 1) + ")";
    case 5: return "(" + random_expr(rng, depth - 1) + ")^" + random_expr(rng, depth - 2);
    default: {
      static const char ops[] = {'+', '-', '*', '/'};
      return random_expr(rng, depth - 1) + " " + ops[pick(rng) % 4] + " " +
             random_expr(rng, depth - 1);
    }
  }
}

}  // namespace

TEST(RoundTrip, PrettyPrintReparses) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const std::string src = random_expr(rng, 4);
    const Expr a = parse_expr(src);
    const Expr b = parse_expr(a.to_string());
    EXPECT_TRUE(structurally_equal(a, b)) << src << " -> " << a.to_string();
  }
}
