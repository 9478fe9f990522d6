#pragma once

#include <cstdio>
#include <sstream>
#include <string>

#include "confel/config.hpp"
#include "confel/dynamics.hpp"

namespace confel {

struct RunOptions {
  double tol = 1e-6;          // derive: numeric cross-check; simulate: drift flag
  double cond_bound = 1e12;
};

// Outcome of one command. exit_code follows the tool contract: 0 success,
// 1 verification failure, 2 input error, 3 numeric abort. report is what the
// tool prints; extra carries the kv rendering (verify) or the CSV (simulate).
struct RunResult {
  int exit_code = 0;
  std::string report;
  std::string extra;
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += fmt_double(values[i]);
  }
  return out;
}

inline std::string problem_header(const ProblemConfig& cfg) {
  std::string out;
  out += "structure: " + std::string(to_string(cfg.structure)) + "\n";
  out += "n: " + std::to_string(cfg.n) + "\n";
  out += "a: " + cfg.a.str() + "\n";
  out += "b: " + cfg.b.str() + "\n";
  out += "lambda: " + cfg.lambda.str() + "\n";
  return out;
}

}  // namespace detail

// Relation, metric-compatibility, and closedness checks for the configured
// structure. Verification fails (exit 1) when any reported check fails.
inline RunResult run_verify(const ProblemConfig& cfg) {
  StructureEndo w = make_structure(cfg);
  Metric g = make_metric(cfg);
  RelationReport relations = verify_relations(cfg.a, cfg.b, cfg.lambda, cfg.n);
  KahlerResult kahler = kahler_form(g, w);

  bool pass = relations.all_hold() && kahler.closed;
  std::string text;
  std::string kv = relations.to_kv();

  text += "verification report\n";
  text += detail::problem_header(cfg);
  text += "metric: " + g.str() + "\n\n";
  text += "relations:\n" + relations.to_text() + "\n";

  if (w.conformal()) {
    text += "compatibility: skipped (not defined for conformal actions)\n";
    kv += "compatibility.skipped=true\n";
  } else {
    CompatibilityReport compat = check_compatibility(w, g);
    pass = pass && compat.holds();
    text += "compatibility: ";
    if (compat.holds()) {
      text += "holds (coefficient " + compat.required_coefficient.str() + ", " +
              std::to_string(compat.pairs_checked) + " pairs checked)\n";
    } else {
      text += "FAILS (coefficient " + compat.required_coefficient.str() + ", " +
              std::to_string(compat.failures.size()) + " of " +
              std::to_string(compat.pairs_checked) + " pairs)\n";
      for (const CompatibilityPair& p : compat.failures)
        text += "  pair (" + std::to_string(p.j) + ", " + std::to_string(p.k) +
                "): lhs " + p.lhs.str() + ", required " + p.rhs.str() + "\n";
    }
    kv += "compatibility.holds=" + std::string(compat.holds() ? "true" : "false") + "\n";
  }

  text += "kahler form: " + kahler.form.str() + "\n";
  text += "kahler closed: " + std::string(kahler.closed ? "yes" : "no") + "\n";
  kv += "kahler.closed=" + std::string(kahler.closed ? "true" : "false") + "\n";

  text += "\nverdict: " + std::string(pass ? "PASS" : "FAIL") + "\n";
  kv += "verdict=" + std::string(pass ? "pass" : "fail") + "\n";
  return RunResult{pass ? 0 : 1, text, kv};
}

// Derivation document: the closed family and the pipeline system side by
// side, one block per coordinate, with the cross-check status. Output is a
// pure function of the config, so reruns are byte-identical.
inline RunResult run_derive(const ProblemConfig& cfg, const RunOptions& opts = {}) {
  StructureEndo w = make_structure(cfg);
  ELSystem sys = derive_el(cfg.lagrangian, w, opts.tol > 0 ? opts.tol : 1e-9);
  PrintOptions render{sys.dim()};

  std::string text;
  text += "derivation report\n";
  text += detail::problem_header(cfg);
  text += "lagrangian: " + cfg.lagrangian.str() + "\n";
  text += "family coefficient: " + sys.equations[0].coefficient.str() + "\n\n";
  text += "equations (coefficient * d/dt(momentum) + forcing = 0):\n";

  int match = 0, numeric_only = 0, mismatch = 0;
  for (const ELEquation& eq : sys.equations) {
    text += "eq" + std::to_string(eq.slot) + ": momentum " + eq.momentum.str() +
            ", partner x" + std::to_string(eq.partner) + "\n";
    text += "  closed:   " + eq.closed_lhs.str(render) + " = 0\n";
    text += "  pipeline: " + eq.pipeline_lhs.str(render) + " = 0\n";
    MatchStatus status = sys.cross_check[static_cast<size_t>(eq.slot)];
    text += "  cross-check: " + std::string(to_string(status)) + "\n";
    if (status == MatchStatus::Match) ++match;
    if (status == MatchStatus::NumericOnly) ++numeric_only;
    if (status == MatchStatus::Mismatch) ++mismatch;
  }

  text += "\ndegenerate: " + std::string(sys.degenerate ? "yes" : "no") + "\n";
  text += "cross-check: " + std::to_string(match) + " match, " +
          std::to_string(numeric_only) + " numeric-only, " + std::to_string(mismatch) +
          " mismatch\n";
  return RunResult{0, text, ""};
}

// Derive, integrate, and monitor in one pass. On a singular mass matrix the
// result carries exit code 3 and the diagnostics instead of a summary.
inline RunResult run_simulate(const ProblemConfig& cfg, const RunOptions& opts = {}) {
  if (!cfg.has_t_end)
    throw ConfigError("simulate requires 't_end'");
  if (cfg.x0.empty())
    throw ConfigError("simulate requires 'x0'");

  StructureEndo w = make_structure(cfg);
  ELSystem sys = derive_el(cfg.lagrangian, w);
  IntegrateOptions iopts;
  iopts.t_end = cfg.t_end;
  iopts.step = cfg.step;
  iopts.output_every = cfg.output_every;
  iopts.condition_bound = opts.cond_bound;

  std::vector<TrajectoryState> traj;
  try {
    traj = integrate(sys, cfg.x0, iopts);
  } catch (const SingularSystemError& err) {
    std::string report;
    report += "simulation aborted: " + std::string(err.what()) + "\n";
    report += "state: " + detail::join_doubles(err.state()) + "\n";
    return RunResult{3, report, ""};
  }
  double drift = monitor_energy(traj, cfg.lagrangian, w);

  std::ostringstream csv;
  write_trajectory_csv(csv, traj, sys.dim());

  std::string text;
  text += "simulation summary\n";
  text += detail::problem_header(cfg);
  text += "t_end: " + detail::fmt_double(cfg.t_end) + "\n";
  text += "h: " + detail::fmt_double(cfg.step) + "\n";
  text += "output_every: " + std::to_string(cfg.output_every) + "\n";
  text += "rows: " + std::to_string(traj.size()) + "\n";
  text += "final t: " + detail::fmt_double(traj.back().t) + "\n";
  text += "final x: " + detail::join_doubles(traj.back().x) + "\n";
  text += "max energy drift: " + detail::fmt_double(drift) + "\n";
  text += "drift tolerance: " + detail::fmt_double(opts.tol) + "\n";
  text += "drift within tolerance: " + std::string(drift <= opts.tol ? "yes" : "no") + "\n";
  return RunResult{0, text, csv.str()};
}

}  // namespace confel
