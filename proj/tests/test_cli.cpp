#include "confel/cli.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace confel {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  EXPECT_TRUE(in.good()) << "cannot open " << path;
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path data_dir() { return fs::path(CONFEL_TEST_DATA_DIR); }

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("confel_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Spawns the installed tool and returns its exit status.
int run_tool(const std::string& args) {
  std::string cmd = std::string(CONFEL_BIN_PATH) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

ProblemConfig config_from(const std::string& text) { return parse_problem_config(text); }

TEST(Config, DefaultsFillTheTitleCase) {
  ProblemConfig cfg = config_from("structure = F\nlagrangian = x0^2\n");
  EXPECT_EQ(cfg.n, 1);
  EXPECT_EQ(cfg.a, Rational(1));
  EXPECT_EQ(cfg.b, Rational(-1));
  EXPECT_TRUE(cfg.lambda.is_zero());
  EXPECT_EQ(cfg.metric_text, "default");
  EXPECT_DOUBLE_EQ(cfg.step, 1e-3);
  EXPECT_EQ(cfg.output_every, 1);
  EXPECT_FALSE(cfg.has_t_end);
  EXPECT_TRUE(cfg.x0.empty());
}

TEST(Config, ParsesEveryKey) {
  ProblemConfig cfg = config_from(
      "# comment\n"
      "structure = H\n"
      "n = 2\n"
      "a = 3/2\n"
      "b = -0.25\n"
      "lambda = x0 + 2*x2\n"
      "lagrangian = x0*x4\n"
      "metric = +1,+1,+1,+1,-1,-1,-1,-1\n"
      "t_end = 2.5\n"
      "h = 0.01\n"
      "output_every = 5\n"
      "x0 = 1,0,0,0,0,0,0,0\n");
  EXPECT_EQ(cfg.structure, StructureKind::H);
  EXPECT_EQ(cfg.n, 2);
  EXPECT_EQ(cfg.a, Rational(3, 2));
  EXPECT_EQ(cfg.b, Rational(-1, 4));
  EXPECT_EQ(cfg.lambda, Expr::var(0) + Expr::var(2).scaled(Rational(2)));
  EXPECT_TRUE(cfg.has_t_end);
  EXPECT_DOUBLE_EQ(cfg.t_end, 2.5);
  EXPECT_EQ(cfg.output_every, 5);
  ASSERT_EQ(cfg.x0.size(), 8u);
  Metric g = make_metric(cfg);
  EXPECT_EQ(g.sign(0), 1);
  EXPECT_EQ(g.sign(7), -1);
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(config_from("structure = F\n"), ConfigError);           // no lagrangian
  EXPECT_THROW(config_from("lagrangian = x0\n"), ConfigError);         // no structure
  EXPECT_THROW(config_from("structure = Q\nlagrangian = x0\n"), ConfigError);
  EXPECT_THROW(config_from("structure = F\nlagrangian = x0\nfoo = 1\n"), ConfigError);
  EXPECT_THROW(config_from("structure = F\nstructure = G\nlagrangian = x0\n"),
               ConfigError);
  EXPECT_THROW(config_from("structure = F\nlagrangian = x0\nn = 0\n"), ConfigError);
  EXPECT_THROW(config_from("structure = F\nlagrangian = x0\na = 0\n"), ConfigError);
  EXPECT_THROW(config_from("structure = F\nlagrangian = x0\na = x1\n"), ConfigError);
  EXPECT_THROW(config_from("structure = F\nlagrangian = x0\nh = 0\n"), ConfigError);
  EXPECT_THROW(config_from("structure = F\nlagrangian = x0\nt_end = -1\n"), ConfigError);
  EXPECT_THROW(config_from("structure = F\nlagrangian = x0\nx0 = 1,2\n"), ConfigError);
  EXPECT_THROW(config_from("structure = F\nlagrangian = x0\nlambda = lam\n"),
               ConfigError);
  EXPECT_THROW(config_from("structure = F\nlagrangian = x9\n"), ConfigError);
  EXPECT_THROW(config_from("no equals sign\n"), ConfigError);
}

TEST(Config, ErrorsCarryLineNumbers) {
  try {
    config_from("structure = F\nlagrangian = x0\nbogus = 1\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& err) {
    EXPECT_EQ(err.line(), 3);
    EXPECT_NE(std::string(err.what()).find("line 3"), std::string::npos);
  }
}

TEST(Config, MetricValidation) {
  ProblemConfig cfg = config_from("structure = F\nlagrangian = x0\nmetric = +1,-1\n");
  EXPECT_THROW(make_metric(cfg), ConfigError);
  cfg = config_from("structure = F\nlagrangian = x0\nmetric = +1,-1,2,-1\n");
  EXPECT_THROW(make_metric(cfg), ConfigError);
}

TEST(RunVerify, TitleCaseMatchesGolden) {
  ProblemConfig cfg = config_from(slurp(data_dir() / "cfg_title.cfg"));
  RunResult result = run_verify(cfg);
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_EQ(result.report, slurp(data_dir() / "golden" / "cfg_title.verify.txt"));
  EXPECT_NE(result.extra.find("verdict=pass"), std::string::npos);
  EXPECT_NE(result.extra.find("relation.F2.holds=true"), std::string::npos);
}

TEST(RunVerify, QuaternionCaseMatchesGolden) {
  ProblemConfig cfg = config_from(slurp(data_dir() / "cfg_quat.cfg"));
  RunResult result = run_verify(cfg);
  EXPECT_EQ(result.exit_code, 1);
  EXPECT_EQ(result.report, slurp(data_dir() / "golden" / "cfg_quat.verify.txt"));
  EXPECT_NE(result.extra.find("relation.G2.ratio=-1"), std::string::npos);
  EXPECT_NE(result.extra.find("verdict=fail"), std::string::npos);
}

TEST(RunVerify, ConformalSkipsCompatibility) {
  ProblemConfig cfg = config_from(slurp(data_dir() / "cfg_conformal_g.cfg"));
  RunResult result = run_verify(cfg);
  EXPECT_NE(result.report.find("compatibility: skipped"), std::string::npos);
  // The composed-product relations pick up conformal weights, so the
  // conformal configuration does not verify.
  EXPECT_EQ(result.exit_code, 1);
}

TEST(RunDerive, GoldenDocuments) {
  ProblemConfig title = config_from(slurp(data_dir() / "cfg_title.cfg"));
  EXPECT_EQ(run_derive(title).report,
            slurp(data_dir() / "golden" / "cfg_title.derive.txt"));
  ProblemConfig conformal = config_from(slurp(data_dir() / "cfg_conformal_g.cfg"));
  EXPECT_EQ(run_derive(conformal).report,
            slurp(data_dir() / "golden" / "cfg_conformal_g.derive.txt"));
}

TEST(RunDerive, IsDeterministic) {
  ProblemConfig cfg = config_from(slurp(data_dir() / "cfg_conformal_g.cfg"));
  RunResult first = run_derive(cfg);
  RunResult second = run_derive(cfg);
  EXPECT_EQ(first.report, second.report);
  EXPECT_EQ(first.exit_code, 0);
}

TEST(RunDerive, FlagsDegenerateLagrangians) {
  ProblemConfig cfg = config_from("structure = F\nlagrangian = 0\n");
  RunResult result = run_derive(cfg);
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_NE(result.report.find("degenerate: yes"), std::string::npos);
  EXPECT_NE(result.report.find("closed:   0 = 0"), std::string::npos);
}

TEST(RunSimulate, HarmonicSummary) {
  ProblemConfig cfg = config_from(slurp(data_dir() / "cfg_harmonic_sim.cfg"));
  RunResult result = run_simulate(cfg);
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_NE(result.report.find("rows: 11"), std::string::npos);
  EXPECT_NE(result.report.find("drift within tolerance: yes"), std::string::npos);
  size_t lines = 0;
  for (char c : result.extra)
    if (c == '\n') ++lines;
  EXPECT_EQ(lines, 12u);
}

TEST(RunSimulate, RequiresHorizonAndInitialState) {
  EXPECT_THROW(run_simulate(config_from("structure = F\nlagrangian = x0^2\nx0 = 1,0,0,0\n")),
               ConfigError);
  EXPECT_THROW(run_simulate(config_from("structure = F\nlagrangian = x0^2\nt_end = 1\n")),
               ConfigError);
}

TEST(RunSimulate, SingularAbortCarriesDiagnostics) {
  ProblemConfig cfg = config_from(slurp(data_dir() / "cfg_linear.cfg"));
  RunResult result = run_simulate(cfg);
  EXPECT_EQ(result.exit_code, 3);
  EXPECT_NE(result.report.find("simulation aborted"), std::string::npos);
  EXPECT_NE(result.report.find("state: 0.25"), std::string::npos);
}

TEST(Tool, ExitCodeContract) {
  std::string data = data_dir().string();
  EXPECT_EQ(run_tool("verify " + data + "/cfg_title.cfg"), 0);
  EXPECT_EQ(run_tool("verify " + data + "/cfg_quat.cfg"), 1);
  EXPECT_EQ(run_tool("derive " + data + "/cfg_badlagr.cfg"), 2);
  EXPECT_EQ(run_tool("verify " + data + "/does_not_exist.cfg"), 2);
  EXPECT_EQ(run_tool("simulate " + data + "/cfg_linear.cfg"), 3);
  EXPECT_EQ(run_tool("--help"), 0);
  EXPECT_EQ(run_tool("frobnicate"), 2);
}

TEST(Tool, WritesVerifyReports) {
  fs::path out = fresh_dir("verify");
  ASSERT_EQ(run_tool("verify " + (data_dir() / "cfg_title.cfg").string() + " --out " +
                     out.string()),
            0);
  EXPECT_EQ(slurp(out / "verify_report.txt"),
            slurp(data_dir() / "golden" / "cfg_title.verify.txt"));
  EXPECT_NE(slurp(out / "verify_report.kv").find("verdict=pass"), std::string::npos);
  fs::remove_all(out);
}

TEST(Tool, SimulateWritesDeterministicFiles) {
  fs::path out1 = fresh_dir("sim1");
  fs::path out2 = fresh_dir("sim2");
  std::string cfg = (data_dir() / "cfg_harmonic_sim.cfg").string();
  ASSERT_EQ(run_tool("simulate " + cfg + " --out " + out1.string()), 0);
  ASSERT_EQ(run_tool("simulate " + cfg + " --out " + out2.string()), 0);
  std::string csv = slurp(out1 / "trajectory.csv");
  EXPECT_EQ(csv, slurp(out2 / "trajectory.csv"));
  EXPECT_EQ(slurp(out1 / "summary.txt"), slurp(out2 / "summary.txt"));

  std::istringstream in(csv);
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(line, "t,x0,x1,x2,x3,E");
  std::string last;
  size_t rows = 0;
  while (std::getline(in, line)) {
    last = line;
    ++rows;
  }
  EXPECT_EQ(rows, 11u);
  double t, x0v, x1v;
  ASSERT_EQ(std::sscanf(last.c_str(), "%lf,%lf,%lf", &t, &x0v, &x1v), 3);
  EXPECT_DOUBLE_EQ(t, 1.0);
  EXPECT_NEAR(x0v, std::cos(1.0), 1e-6);
  EXPECT_NEAR(x1v, std::sin(1.0), 1e-6);
  fs::remove_all(out1);
  fs::remove_all(out2);
}

TEST(Tool, ConditionBoundOverrideAborts) {
  std::string cfg = (data_dir() / "cfg_harmonic_sim.cfg").string();
  EXPECT_EQ(run_tool("simulate " + cfg + " --cond-bound 0.5"), 3);
}

}  // namespace
}  // namespace confel
