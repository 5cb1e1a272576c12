#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "hqflow/errors.hpp"
#include "output.hpp"

using namespace hqflow;
using namespace hqflow::app;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = HQFLOW_CONFIG_DIR;
const fs::path kOut = HQFLOW_TEST_OUT;

CommandContext ctx_for(const std::string& name, std::ostream* log = nullptr) {
  CommandContext ctx;
  ctx.out_override = kOut / name;
  ctx.log = log;
  fs::remove_all(kOut / name);
  return ctx;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kOut);
  const fs::path p = kOut / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

const char* kSmallLaplace =
    "problem.k = 1\n"
    "problem.f = 1\n"
    "problem.phi = 1\n"
    "problem.u0 = \"(x1^2+x2^2)/2 + 0.05*x1*(x1^2+x2^2-3)\"\n"
    "grid.nr = 8\n"
    "grid.ntheta = 16\n"
    "flow.mode = translating\n"
    "flow.tol_trans = 1e-6\n";

}  // namespace

TEST(Config, ParsesAndHashesCanonically) {
  const RunConfig a = parse_config("# c\nproblem.k = 2\nproblem.f = \"1 + x1^2\"\nproblem.phi = 1\nproblem.u0 = \"x1^2+x2^2\"\n");
  const RunConfig b = parse_config("problem.u0 = \"x1^2+x2^2\"\nproblem.phi = 1\n\nproblem.f = \"1 + x1^2\"   # f\nproblem.k = 2\n");
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_EQ(a.problem.q.k, 2);
  EXPECT_DOUBLE_EQ(a.problem.f.eval({2, 0, 0, 0}), 5.0);
  const RunConfig c = parse_config("problem.k = 1\nproblem.f = \"1 + x1^2\"\nproblem.phi = 1\nproblem.u0 = \"x1^2+x2^2\"\n");
  EXPECT_NE(a.hash, c.hash);
}

TEST(Config, RejectsDuplicatesAndUnknownKeys) {
  EXPECT_THROW((void)parse_entries("a = 1\na = 2\n"), ConfigurationError);
  try {
    (void)parse_config("problem.bogus = 1\n");
    FAIL();
  } catch (const ConfigurationError& e) {
    EXPECT_EQ(e.field(), "problem.bogus");
  }
}

TEST(Config, SquareNeedsExplicitFlag) {
  try {
    (void)parse_config("problem.domain = square\nproblem.f = 1\nproblem.phi = 1\nproblem.u0 = x1^2\n");
    FAIL();
  } catch (const ConfigurationError& e) {
    EXPECT_EQ(e.field(), "problem.domain");
  }
}

TEST(Config, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
}

TEST(ParseLevels, CountsAndLists) {
  EXPECT_EQ(parse_levels("3"), (std::vector<int>{1, 2, 4}));
  EXPECT_EQ(parse_levels("4,1,2"), (std::vector<int>{1, 2, 4}));
  EXPECT_THROW((void)parse_levels("1,2,2"), ArgumentError);
  EXPECT_THROW((void)parse_levels("1"), ArgumentError);
  EXPECT_THROW((void)parse_levels("x"), ArgumentError);
}

TEST(Cli, RepeatedLevelsAreArgumentError) {
  EXPECT_EQ(cmd_converge(kConfigs / "manufactured_k2.cfg", {1, 2, 2}, ctx_for("dup")), exit_config);
}

TEST(Cli, BadPhiExitsWithConfigError) {
  std::ostringstream log;
  EXPECT_EQ(cmd_flow(kConfigs / "bad_phi.cfg", ctx_for("bad_phi", &log)), exit_config);
  EXPECT_NE(log.str().find("phi_u <= c_phi < 0"), std::string::npos) << log.str();
  EXPECT_NE(log.str().find("problem.phi"), std::string::npos);
}

TEST(Cli, InadmissibleU0ExitsWithConfigError) {
  std::ostringstream log;
  EXPECT_EQ(cmd_flow(kConfigs / "bad_u0.cfg", ctx_for("bad_u0", &log)), exit_config);
  EXPECT_NE(log.str().find("Gamma_"), std::string::npos) << log.str();
  EXPECT_NE(log.str().find("node"), std::string::npos);
}

TEST(Cli, MissingConfigFile) {
  EXPECT_EQ(cmd_flow(kConfigs / "does_not_exist.cfg", ctx_for("missing")), exit_config);
}

TEST(Cli, FlowWritesArtifactsWithMetadata) {
  const fs::path cfg = write_config("small_laplace.cfg", kSmallLaplace);
  EXPECT_EQ(cmd_flow(cfg, ctx_for("small_flow")), exit_ok);
  const std::string mon = slurp(kOut / "small_flow" / "monitors.csv");
  EXPECT_EQ(mon.rfind("# command=flow; config_hash=0x", 0), 0u);
  EXPECT_NE(mon.find("\nt,max_ut,min_ut,min_u,max_u,sup_grad,sup_hess,min_quotient,osc,status\n"),
            std::string::npos);
  const Json s = Json::parse(slurp(kOut / "small_flow" / "summary.json"));
  EXPECT_EQ(s["meta"]["command"], "flow");
  EXPECT_EQ(s["status"], "converged");
  EXPECT_EQ(s["meta"]["outside_theory"], false);
  EXPECT_NEAR(s["speed"].get<double>(), std::log(2.0), 1e-2);
  const std::string fin = slurp(kOut / "small_flow" / "final.csv");
  EXPECT_NE(fin.find("\nx,y,u\n"), std::string::npos);
}

TEST(Cli, RerunIsByteIdentical) {
  const fs::path cfg = write_config("small_laplace.cfg", kSmallLaplace);
  ASSERT_EQ(cmd_flow(cfg, ctx_for("rerun_a")), exit_ok);
  ASSERT_EQ(cmd_flow(cfg, ctx_for("rerun_b")), exit_ok);
  for (const char* f : {"monitors.csv", "final.csv", "summary.json"})
    EXPECT_EQ(slurp(kOut / "rerun_a" / f), slurp(kOut / "rerun_b" / f)) << f;
}

TEST(Cli, EigenScalingFShiftsSpeed) {
  const std::string base = std::string(kSmallLaplace);
  const fs::path a = write_config("eig_a.cfg", base);
  std::string scaled = base;
  scaled.replace(scaled.find("problem.f = 1"), 13, "problem.f = 2");
  const fs::path b = write_config("eig_b.cfg", scaled);
  ASSERT_EQ(cmd_eigen(a, ctx_for("eig_a")), exit_ok);
  ASSERT_EQ(cmd_eigen(b, ctx_for("eig_b")), exit_ok);
  const Json ja = Json::parse(slurp(kOut / "eig_a" / "summary.json"));
  const Json jb = Json::parse(slurp(kOut / "eig_b" / "summary.json"));
  EXPECT_NEAR(ja["s_hat"].get<double>(), ja["oracle_s"].get<double>(), 1e-2);
  EXPECT_NEAR(jb["s_hat"].get<double>() - ja["s_hat"].get<double>(), -std::log(2.0), 1e-6);
  EXPECT_EQ(ja["epsilon_trace"].size(), 7u);
  EXPECT_TRUE(fs::exists(kOut / "eig_a" / "profile.csv"));
}

TEST(Cli, VerifyExitCodes) {
  std::ostringstream log;
  EXPECT_EQ(cmd_verify(42, 0, false, ctx_for("verify0", &log)), exit_ok);
  const Json j = Json::parse(slurp(kOut / "verify0" / "verify.json"));
  EXPECT_EQ(j["passed"], true);
  EXPECT_FALSE(j["warnings"].empty());
  EXPECT_EQ(cmd_verify(42, 50, true, ctx_for("verify_fault")), exit_failed);
}

TEST(Cli, SquareConvergenceIsSecondOrder) {
  EXPECT_EQ(cmd_converge(kConfigs / "manufactured_square_k1.cfg", {1, 2, 4}, ctx_for("square")),
            exit_ok);
  const Json j = Json::parse(slurp(kOut / "square" / "converge.json"));
  EXPECT_EQ(j["meta"]["outside_theory"], true);
  for (const auto& p : j["orders"]) EXPECT_NEAR(p.get<double>(), 2.0, 0.2);
}

TEST(Cli, RunCliUsageErrors) {
  char prog[] = "hqflow";
  char bogus[] = "bogus";
  char* argv[] = {prog, bogus};
  EXPECT_EQ(run_cli(2, argv), exit_config);
}
