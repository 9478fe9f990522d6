#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "confel/cli.hpp"

namespace {

confel::ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw confel::ConfigError("cannot open '" + path + "'");
  return confel::parse_problem_config(in);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structure verification, Euler-Lagrange derivation, and simulation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  confel::RunOptions opts;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "problem description file")->required();
    cmd->add_option("--out", out_dir, "directory to write report files into");
    cmd->add_option("--tol", opts.tol,
                    "numeric tolerance (derive cross-check, simulate drift flag)");
    cmd->add_option("--cond-bound", opts.cond_bound,
                    "condition-number bound before the integrator aborts");
  };

  CLI::App* verify = app.add_subcommand(
      "verify", "check structure relations, metric compatibility, and closedness");
  CLI::App* derive =
      app.add_subcommand("derive", "derive the equations of motion two ways");
  CLI::App* simulate =
      app.add_subcommand("simulate", "integrate the derived system and monitor energy");
  add_common(verify);
  add_common(derive);
  add_common(simulate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    confel::ProblemConfig cfg = load_config(config_path);
    confel::RunResult result;
    if (verify->parsed())
      result = confel::run_verify(cfg);
    else if (derive->parsed())
      result = confel::run_derive(cfg, opts);
    else
      result = confel::run_simulate(cfg, opts);

    if (result.exit_code == 3) {
      std::cerr << result.report;
      return 3;
    }
    std::cout << result.report;

    if (!out_dir.empty()) {
      std::filesystem::path dir(out_dir);
      std::filesystem::create_directories(dir);
      if (verify->parsed()) {
        write_file(dir / "verify_report.txt", result.report);
        write_file(dir / "verify_report.kv", result.extra);
      } else if (derive->parsed()) {
        write_file(dir / "derivation.txt", result.report);
      } else {
        write_file(dir / "summary.txt", result.report);
        write_file(dir / "trajectory.csv", result.extra);
      }
    }
    return result.exit_code;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
