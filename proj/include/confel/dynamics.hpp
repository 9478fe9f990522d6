#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "confel/mechanics.hpp"

namespace confel {

// The derived equations at a point, as the linear system M * xdot = r.
struct OdeAssembly {
  Eigen::MatrixXd mass;
  Eigen::VectorXd rhs;
};

inline OdeAssembly assemble(const ELSystem& sys, std::span<const double> x) {
  const int dim = sys.dim();
  if (static_cast<int>(x.size()) != dim)
    throw std::invalid_argument("assemble: point size does not match the chart");
  OdeAssembly out{Eigen::MatrixXd(dim, dim), Eigen::VectorXd(dim)};
  for (int k = 0; k < dim; ++k) {
    const ELEquation& eq = sys.equations[static_cast<size_t>(k)];
    for (int j = 0; j < dim; ++j)
      out.mass(k, j) = eval(eq.mass_row[static_cast<size_t>(j)], x, sys.lambda);
    out.rhs(k) = -eval(eq.forcing, x, sys.lambda);
  }
  return out;
}

// Raised when the mass matrix is singular or its estimated condition number
// exceeds the configured bound; carries the offending time and state.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(double t, std::vector<double> state, double condition)
      : std::runtime_error("mass matrix is singular or ill-conditioned at t=" +
                           std::to_string(t) +
                           " (condition estimate " + std::to_string(condition) + ")"),
        t_(t),
        state_(std::move(state)),
        condition_(condition) {}

  double t() const { return t_; }
  const std::vector<double>& state() const { return state_; }
  double condition() const { return condition_; }

 private:
  double t_;
  std::vector<double> state_;
  double condition_;
};

struct TrajectoryState {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> xdot;
  double energy = std::numeric_limits<double>::quiet_NaN();
};

struct IntegrateOptions {
  double t_end = 1.0;
  double step = 1e-3;
  int output_every = 1;        // emit every k-th step; first and last always
  double condition_bound = 1e12;
};

namespace detail {

// Solves M(x) * v = r(x) by dense LU with partial pivoting, refusing to
// continue when the reciprocal condition estimate signals near-singularity.
inline std::vector<double> solve_velocities(const ELSystem& sys,
                                            const std::vector<double>& x, double t,
                                            double condition_bound) {
  OdeAssembly ode = assemble(sys, x);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(ode.mass);
  double rcond = lu.rcond();
  if (!(rcond > 0.0) || !std::isfinite(rcond) || 1.0 / rcond > condition_bound) {
    double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    throw SingularSystemError(t, x, cond);
  }
  Eigen::VectorXd v = lu.solve(ode.rhs);
  if (!v.allFinite()) throw SingularSystemError(t, x, 1.0 / rcond);
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline void rk4_step(const ELSystem& sys, std::vector<double>& x, double t, double h,
                     double condition_bound) {
  const size_t dim = x.size();
  auto shifted = [&](const std::vector<double>& k, double scale) {
    std::vector<double> y(dim);
    for (size_t i = 0; i < dim; ++i) y[i] = x[i] + scale * k[i];
    return y;
  };
  std::vector<double> k1 = solve_velocities(sys, x, t, condition_bound);
  std::vector<double> k2 =
      solve_velocities(sys, shifted(k1, h / 2), t + h / 2, condition_bound);
  std::vector<double> k3 =
      solve_velocities(sys, shifted(k2, h / 2), t + h / 2, condition_bound);
  std::vector<double> k4 = solve_velocities(sys, shifted(k3, h), t + h, condition_bound);
  for (size_t i = 0; i < dim; ++i)
    x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
}

}  // namespace detail

// Fixed-step classical RK4 on M(x) xdot = r(x). Emits the initial state, every
// output_every-th step, and the final state at exactly t_end (integrating a
// shortened last step when t_end is not a multiple of the step size).
inline std::vector<TrajectoryState> integrate(const ELSystem& sys,
                                              const std::vector<double>& x0,
                                              const IntegrateOptions& opts) {
  const int dim = sys.dim();
  if (static_cast<int>(x0.size()) != dim)
    throw std::invalid_argument("integrate: initial state size does not match the chart");
  if (!(opts.step > 0.0)) throw std::invalid_argument("integrate: step must be positive");
  if (opts.t_end < 0.0) throw std::invalid_argument("integrate: t_end must be nonnegative");
  if (opts.output_every < 1)
    throw std::invalid_argument("integrate: output_every must be at least 1");

  const double tiny = 1e-9 * std::max(1.0, std::abs(opts.t_end));
  long long full_steps = std::llround(opts.t_end / opts.step);
  if (std::abs(static_cast<double>(full_steps) * opts.step - opts.t_end) > tiny)
    full_steps = static_cast<long long>(std::floor(opts.t_end / opts.step));
  const double remainder = opts.t_end - static_cast<double>(full_steps) * opts.step;
  const bool partial = remainder > tiny;

  std::vector<TrajectoryState> out;
  std::vector<double> x = x0;
  auto emit = [&](double t) {
    out.push_back(TrajectoryState{
        t, x, detail::solve_velocities(sys, x, t, opts.condition_bound),
        std::numeric_limits<double>::quiet_NaN()});
  };

  emit(0.0);
  if (full_steps == 0 && !partial) return out;

  for (long long s = 1; s <= full_steps; ++s) {
    double t = static_cast<double>(s - 1) * opts.step;
    detail::rk4_step(sys, x, t, opts.step, opts.condition_bound);
    bool last = (s == full_steps) && !partial;
    if (!last && s % opts.output_every == 0) emit(static_cast<double>(s) * opts.step);
  }
  if (partial)
    detail::rk4_step(sys, x, static_cast<double>(full_steps) * opts.step, remainder,
                     opts.condition_bound);
  emit(opts.t_end);
  return out;
}

// Evaluates E along the trajectory, using the solved velocities for the X^k,
// and returns the largest |E(t) - E(0)|. Fills each state's energy field.
inline double monitor_energy(std::vector<TrajectoryState>& trajectory, const Expr& l,
                             const StructureEndo& w) {
  if (trajectory.empty()) return 0.0;
  Expr e = energy(l, generic_semispray(w.n()), w);
  double reference = 0.0;
  double drift = 0.0;
  for (size_t i = 0; i < trajectory.size(); ++i) {
    TrajectoryState& st = trajectory[i];
    std::vector<double> point = st.x;
    point.insert(point.end(), st.xdot.begin(), st.xdot.end());
    st.energy = eval(e, point, w.lambda());
    if (i == 0)
      reference = st.energy;
    else
      drift = std::max(drift, std::abs(st.energy - reference));
  }
  return drift;
}

// CSV with a fixed header and 17 significant digits, enough to round-trip
// IEEE doubles exactly.
inline void write_trajectory_csv(std::ostream& out,
                                 const std::vector<TrajectoryState>& trajectory,
                                 int dim) {
  out << "t";
  for (int k = 0; k < dim; ++k) out << ",x" << k;
  out << ",E\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (const TrajectoryState& st : trajectory) {
    put(st.t);
    for (double v : st.x) {
      out << ',';
      put(v);
    }
    out << ',';
    put(st.energy);
    out << '\n';
  }
}

}  // namespace confel
