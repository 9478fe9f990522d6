#pragma once

#include <random>
#include <vector>

#include "confel/expr.hpp"

// Shared generators and independent numeric oracles for the test suites.
// Everything takes an explicit engine so each test pins its own seed.
namespace confel::testing {

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return d(rng);
}

inline double pick_real(Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

inline Rational random_rational(Rng& rng) {
  int num = 0;
  while (num == 0) num = pick(rng, -5, 5);
  return Rational(num, pick(rng, 1, 3));
}

inline std::vector<double> random_point(Rng& rng, int dim) {
  std::vector<double> p(static_cast<size_t>(dim));
  for (double& v : p) v = pick_real(rng);
  return p;
}

// Small integer-coefficient linear form in at most two of the variables;
// kept tame so exp() of it stays within a comfortable numeric range.
inline Expr random_linear(Rng& rng, int nvars) {
  Expr e = Expr::integer(pick(rng, -1, 1));
  int uses = pick(rng, 1, 2);
  for (int u = 0; u < uses; ++u) {
    int c = 0;
    while (c == 0) c = pick(rng, -2, 2);
    e = e + Expr::var(pick(rng, 0, nvars - 1)).scaled(Rational(c));
  }
  return e;
}

inline Expr random_poly(Rng& rng, int nvars, int max_terms = 4, int max_deg = 3) {
  Expr e;
  int terms = pick(rng, 1, max_terms);
  for (int t = 0; t < terms; ++t) {
    Expr m = Expr::constant(random_rational(rng));
    int deg = pick(rng, 0, max_deg);
    for (int d = 0; d < deg; ++d) m = m * Expr::var(pick(rng, 0, nvars - 1));
    e = e + m;
  }
  return e;
}

// Polynomial plus a few transcendental summands; safe for finite-difference
// checks (no negative powers, bounded growth on [-1,1]^n).
inline Expr random_poly_trig(Rng& rng, int nvars) {
  Expr e = random_poly(rng, nvars);
  int extras = pick(rng, 0, 2);
  for (int x = 0; x < extras; ++x) {
    Expr arg = random_linear(rng, nvars);
    Expr wrapped;
    switch (pick(rng, 0, 2)) {
      case 0: wrapped = Expr::sin_of(arg); break;
      case 1: wrapped = Expr::cos_of(arg); break;
      default: wrapped = Expr::exp_of(arg); break;
    }
    e = e + random_poly(rng, nvars, 2, 2) * wrapped;
  }
  return e;
}

// Adds the conformal symbols and occasional negative powers; used for
// round-trip and canonical-form properties, not for finite differences.
inline Expr random_expr_full(Rng& rng, int nvars) {
  Expr e = random_poly_trig(rng, nvars);
  if (pick(rng, 0, 1)) e = e * Expr::exp_lambda(pick(rng, -2, 2));
  if (pick(rng, 0, 2) == 0) e = e + Expr::lambda() * random_poly(rng, nvars, 2, 2);
  if (pick(rng, 0, 2) == 0)
    e = e + Expr::var(pick(rng, 0, nvars - 1)).pow(-pick(rng, 1, 2)).scaled(random_rational(rng));
  return e;
}

// Central finite difference in coordinate k; the lam binding shifts with the
// point exactly as the chain rule in diff() assumes.
inline double fd_diff(const Expr& e, int k, const Expr& lam,
                      const std::vector<double>& point, double h = 1e-6) {
  std::vector<double> hi = point, lo = point;
  hi[static_cast<size_t>(k)] += h;
  lo[static_cast<size_t>(k)] -= h;
  return (eval(e, hi, lam) - eval(e, lo, lam)) / (2.0 * h);
}

}  // namespace confel::testing
