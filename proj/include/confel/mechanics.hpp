#pragma once

#include <string>
#include <vector>

#include "confel/numeric.hpp"
#include "confel/structures.hpp"

namespace confel {

// Formal velocity symbols: coordinate k pairs with variable index 4n + k.
inline int velocity_index(int n, int k) { return 4 * n + k; }

// X = sum X^k d/dxk with the given component expressions.
inline VectorField semispray(int n, std::vector<Expr> velocities) {
  if (n < 1) throw std::invalid_argument("semispray: block size must be positive");
  if (velocities.size() != static_cast<size_t>(4 * n))
    throw std::invalid_argument("semispray: expected 4n velocity components");
  return VectorField(4 * n, std::move(velocities));
}

// The generic semispray whose components are the formal velocity symbols.
inline VectorField generic_semispray(int n) {
  std::vector<Expr> v(static_cast<size_t>(4 * n));
  for (int k = 0; k < 4 * n; ++k)
    v[static_cast<size_t>(k)] = Expr::var(velocity_index(n, k));
  return semispray(n, std::move(v));
}

namespace detail {

inline void check_lagrangian(const Expr& l, const StructureEndo& w) {
  if (l.max_var_index() >= w.dim())
    throw std::invalid_argument(
        "lagrangian may only use chart coordinates; velocity symbols are "
        "introduced by the derivation itself");
}

}  // namespace detail

// Twisted differential (d_W L)(Y) = dL(W Y): a 1-form whose dx_k coefficient
// is the structure weight times the partial of L at the image coordinate.
inline DifferentialForm vertical_differential(const Expr& l, const StructureEndo& w) {
  detail::check_lagrangian(l, w);
  DifferentialForm out(w.dim(), 1);
  for (int k = 0; k < w.dim(); ++k)
    out.set_coefficient({k}, w.weight(k) * diff(l, w.target(k), w.lambda()));
  return out;
}

inline VectorField liouville_field(const VectorField& x, const StructureEndo& w) {
  return apply_endo(w, x);
}

// Phi_L = -d d_W L; closed by construction.
inline DifferentialForm presymplectic(const Expr& l, const StructureEndo& w) {
  return -ext_d(vertical_differential(l, w), w.lambda());
}

// E_L = V(L) - L with V the Liouville field of X.
inline Expr energy(const Expr& l, const VectorField& x, const StructureEndo& w) {
  detail::check_lagrangian(l, w);
  if (x.dim() != w.dim()) throw std::invalid_argument("energy: dimension mismatch");
  VectorField v = liouville_field(x, w);
  Expr e;
  for (int k = 0; k < w.dim(); ++k) {
    if (v.component(k).is_zero()) continue;
    e = e + v.component(k) * diff(l, k, w.lambda());
  }
  return e - l;
}

// i_X Phi_L - dE_L as a 1-form over the base covectors; its coefficients,
// with X carrying formal velocities, are the scalar equations of motion.
inline DifferentialForm dynamical_residual(const Expr& l, const VectorField& x,
                                           const StructureEndo& w) {
  DifferentialForm phi = presymplectic(l, w);
  Expr e = energy(l, x, w);
  return interior(x, phi) - ext_d(DifferentialForm::scalar(w.dim(), e), w.lambda());
}

// --- Euler-Lagrange extraction ----------------------------------------------

enum class MatchStatus { Match, NumericOnly, Mismatch };

inline const char* to_string(MatchStatus s) {
  switch (s) {
    case MatchStatus::Match: return "match";
    case MatchStatus::NumericOnly: return "numeric-only";
    default: return "MISMATCH";
  }
}

// One scalar equation of the closed-form family, in the shape
//   coefficient * d/dt(momentum) + forcing = 0
// with d/dt expanded along the curve as sum_j xdot_j d/dxj. mass_row holds
// the already-scaled coefficients of the xdot_j, so closed_lhs is
//   sum_j xdot_j * mass_row[j] + forcing.
struct ELEquation {
  int slot = 0;
  Rational coefficient;
  int lam_sign = 0;      // exponent sign on the momentum's conformal weight
  int partner = 0;       // the block-paired coordinate entering the forcing
  int forcing_sign = 1;
  Expr momentum;
  Expr forcing;
  std::vector<Expr> mass_row;
  Expr closed_lhs;
  Expr pipeline_lhs;
};

struct ELSystem {
  StructureKind kind = StructureKind::F;
  Rational a, b;
  Expr lambda;
  int n = 1;
  std::vector<ELEquation> equations;
  DifferentialForm residual{4, 1};
  std::vector<MatchStatus> cross_check;
  bool degenerate = false;  // every mass row vanishes identically

  int dim() const { return 4 * n; }

  bool all_match() const {
    for (MatchStatus s : cross_check)
      if (s != MatchStatus::Match) return false;
    return true;
  }
};

// Derives the equations of motion twice and compares: once by transcribing
// the closed family for the structure kind (momentum weights, forcing signs,
// and block pairing below), once through the geometric pipeline
// i_X Phi_L - dE_L with formal velocities. The pipeline residual coefficient
// at dx_{sigma(k)}, scaled by the forcing sign, lines up with closed
// equation k; sigma is the endomorphism's own index pairing, so the
// comparison involves no hand-tuned matching.
inline ELSystem derive_el(const Expr& l, const StructureEndo& w,
                          double numeric_tol = 1e-9) {
  detail::check_lagrangian(l, w);
  const int n = w.n();
  const int dim = w.dim();
  const Expr& lam = w.lambda();
  const bool flat = lam.is_zero();

  // Per-block momentum weight signs and forcing signs of the three families.
  int weight_sign[4];
  int force_sign[4];
  Rational coef;
  switch (w.kind()) {
    case StructureKind::F:
      coef = w.a();
      weight_sign[0] = -1; weight_sign[1] = +1; weight_sign[2] = -1; weight_sign[3] = +1;
      force_sign[0] = +1; force_sign[1] = -1; force_sign[2] = +1; force_sign[3] = -1;
      break;
    case StructureKind::G:
      coef = w.b();
      weight_sign[0] = -1; weight_sign[1] = -1; weight_sign[2] = +1; weight_sign[3] = +1;
      force_sign[0] = +1; force_sign[1] = -1; force_sign[2] = +1; force_sign[3] = -1;
      break;
    case StructureKind::H:
      coef = w.a() * w.b();
      weight_sign[0] = -1; weight_sign[1] = -1; weight_sign[2] = +1; weight_sign[3] = +1;
      force_sign[0] = +1; force_sign[1] = +1; force_sign[2] = +1; force_sign[3] = +1;
      break;
  }

  ELSystem sys;
  sys.kind = w.kind();
  sys.a = w.a();
  sys.b = w.b();
  sys.lambda = lam;
  sys.n = n;
  sys.residual = dynamical_residual(l, generic_semispray(n), w);

  bool any_mass = false;
  for (int k = 0; k < dim; ++k) {
    const int block = k / n;
    ELEquation eq;
    eq.slot = k;
    eq.coefficient = coef;
    eq.lam_sign = flat ? 0 : weight_sign[block];
    eq.partner = w.target(k);
    eq.forcing_sign = force_sign[block];
    eq.momentum = Expr::exp_lambda(eq.lam_sign) * diff(l, k, lam);
    eq.forcing = diff(l, eq.partner, lam).scaled(Rational(eq.forcing_sign));

    eq.mass_row.resize(static_cast<size_t>(dim));
    Expr closed = eq.forcing;
    for (int j = 0; j < dim; ++j) {
      Expr m = diff(eq.momentum, j, lam).scaled(coef);
      if (!m.is_zero()) any_mass = true;
      closed = closed + Expr::var(velocity_index(n, j)) * m;
      eq.mass_row[static_cast<size_t>(j)] = std::move(m);
    }
    eq.closed_lhs = std::move(closed);
    eq.pipeline_lhs =
        sys.residual.coefficient({eq.partner}).scaled(Rational(eq.forcing_sign));

    MatchStatus status;
    if (eq.closed_lhs == eq.pipeline_lhs) {
      status = MatchStatus::Match;
    } else if (numeric_expr_equal(eq.closed_lhs, eq.pipeline_lhs, lam, 2 * dim, 30,
                                  numeric_tol)) {
      status = MatchStatus::NumericOnly;
    } else {
      status = MatchStatus::Mismatch;
    }
    sys.cross_check.push_back(status);
    sys.equations.push_back(std::move(eq));
  }
  sys.degenerate = !any_mass;
  return sys;
}

}  // namespace confel
