#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "hqflow/symmfunc.hpp"
#include "hqflow/verify.hpp"

using namespace hqflow;

TEST(Verify, SmallRunPasses) {
  VerifyOptions opt;
  opt.trials = 500;
  const VerifyReport rep = run_verify(opt);
  EXPECT_TRUE(rep.passed());
  EXPECT_TRUE(rep.warnings.empty());
  std::set<std::string> names;
  for (const auto& p : rep.properties) {
    EXPECT_TRUE(p.ok()) << p.name << " worst margin " << p.worst_margin;
    EXPECT_EQ(p.trials, 500);
    EXPECT_GE(p.worst_margin, -p.tolerance);
    names.insert(p.name);
  }
  EXPECT_EQ(names.size(), rep.properties.size());
  EXPECT_GE(rep.properties.size(), 15u);
}

TEST(Verify, ZeroTrialsIsVacuousWithWarning) {
  VerifyOptions opt;
  opt.trials = 0;
  const VerifyReport rep = run_verify(opt);
  EXPECT_TRUE(rep.passed());
  EXPECT_FALSE(rep.warnings.empty());
}

TEST(Verify, InjectedFaultIsDetected) {
  VerifyOptions opt;
  opt.trials = 200;
  opt.inject_fault = true;
  const VerifyReport rep = run_verify(opt);
  EXPECT_FALSE(rep.passed());
  int failing = 0;
  for (const auto& p : rep.properties) failing += !p.ok();
  EXPECT_GE(failing, 3);
}

TEST(Verify, SameSeedSameReport) {
  VerifyOptions opt;
  opt.trials = 100;
  const VerifyReport a = run_verify(opt);
  const VerifyReport b = run_verify(opt);
  ASSERT_EQ(a.properties.size(), b.properties.size());
  for (std::size_t i = 0; i < a.properties.size(); ++i)
    EXPECT_EQ(a.properties[i].worst_margin, b.properties[i].worst_margin);
}

TEST(FaultySigma, DiffersOnlyThroughLastEntry) {
  const std::vector<double> lam{1, 2, 3};
  EXPECT_DOUBLE_EQ(faulty_sigma(lam, 1), 0.0);
  const std::vector<double> zero_last{1, 2, 0};
  for (int m = 0; m <= 3; ++m) EXPECT_DOUBLE_EQ(faulty_sigma(zero_last, m), sigma(zero_last, m));
}

TEST(InequalityMargin, Normalization) {
  EXPECT_DOUBLE_EQ(inequality_margin(2.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(inequality_margin(0.5, 0.25), 0.25);
  EXPECT_LT(inequality_margin(1.0, 2.0), 0.0);
}
