#pragma once

#include <random>
#include <vector>

#include "confel/expr.hpp"

namespace confel {

// Randomized evaluation agreement on points drawn from [-1,1]^point_dim,
// with lam bound the same way on both sides. Points where either side fails
// to evaluate (negative powers at a zero, overflow) are redrawn. The seed is
// fixed so report classifications are reproducible run to run.
inline bool numeric_expr_equal(const Expr& a, const Expr& b, const Expr& lam,
                               int point_dim, int points = 30, double tol = 1e-9,
                               uint64_t seed = 0x5eedbead) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> pt(static_cast<size_t>(point_dim));
  int done = 0;
  int attempts = 0;
  while (done < points) {
    if (++attempts > points * 20)
      throw EvalError("numeric comparison could not find enough evaluable points");
    for (double& v : pt) v = dist(rng);
    double va, vb;
    try {
      va = eval(a, pt, lam);
      vb = eval(b, pt, lam);
    } catch (const EvalError&) {
      continue;
    }
    double scale = std::max({1.0, std::abs(va), std::abs(vb)});
    if (std::abs(va - vb) > tol * scale) return false;
    ++done;
  }
  return true;
}

}  // namespace confel
