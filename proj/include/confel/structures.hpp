#pragma once

#include <optional>
#include <string>
#include <vector>

#include "confel/forms.hpp"

namespace confel {

enum class StructureKind { F, G, H };

inline const char* to_string(StructureKind k) {
  switch (k) {
    case StructureKind::F: return "F";
    case StructureKind::G: return "G";
    default: return "H";
  }
}

inline std::optional<StructureKind> structure_kind_from_string(const std::string& s) {
  if (s == "F") return StructureKind::F;
  if (s == "G") return StructureKind::G;
  if (s == "H") return StructureKind::H;
  return std::nullopt;
}

// Action of an endomorphism on one coordinate basis vector: a single target
// basis vector scaled by factor * exp(lam)^lam_power.
struct BasisAction {
  int target;
  Rational factor;
  int lam_power;
};

// One of the three structure endomorphisms on a 4n-chart, acting blockwise
// with conformal weights. When lam is identically zero the weights collapse
// to plain rational factors.
class StructureEndo {
 public:
  StructureEndo(StructureKind kind, const Rational& a, const Rational& b,
                const Expr& lambda, int n)
      : kind_(kind), a_(a), b_(b), lambda_(lambda), n_(n) {
    if (n < 1) throw std::invalid_argument("StructureEndo: block size must be positive");
    if (a.is_zero() || b.is_zero())
      throw std::invalid_argument("StructureEndo: parameters a and b must be nonzero");
    if (lambda.depends_on_lambda())
      throw std::invalid_argument("StructureEndo: the conformal factor must not itself mention lam");
    if (lambda.max_var_index() >= 4 * n)
      throw std::invalid_argument("StructureEndo: the conformal factor may only use chart coordinates");
    build_table();
  }

  StructureKind kind() const { return kind_; }
  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  const Expr& lambda() const { return lambda_; }
  int n() const { return n_; }
  int dim() const { return 4 * n_; }
  bool conformal() const { return !lambda_.is_zero(); }

  const BasisAction& action(int k) const {
    if (k < 0 || k >= dim())
      throw std::out_of_range("StructureEndo: basis index out of range");
    return table_[static_cast<size_t>(k)];
  }
  int target(int k) const { return action(k).target; }

  Expr weight(int k) const {
    const BasisAction& act = action(k);
    return Expr::constant(act.factor) * Expr::exp_lambda(act.lam_power);
  }

 private:
  StructureKind kind_;
  Rational a_, b_;
  Expr lambda_;
  int n_;
  std::vector<BasisAction> table_;

  void build_table() {
    const int n = n_;
    const bool flat = lambda_.is_zero();
    const Rational ab = a_ * b_;
    table_.resize(static_cast<size_t>(4 * n));
    for (int i = 0; i < n; ++i) {
      switch (kind_) {
        case StructureKind::F:
          table_[size_t(i)] = {n + i, a_, 1};
          table_[size_t(n + i)] = {i, -a_, -1};
          table_[size_t(2 * n + i)] = {3 * n + i, a_, 1};
          table_[size_t(3 * n + i)] = {2 * n + i, -a_, -1};
          break;
        case StructureKind::G:
          table_[size_t(i)] = {2 * n + i, -b_, 1};
          table_[size_t(n + i)] = {3 * n + i, b_, 1};
          table_[size_t(2 * n + i)] = {i, -b_, -1};
          table_[size_t(3 * n + i)] = {n + i, b_, -1};
          break;
        case StructureKind::H:
          table_[size_t(i)] = {3 * n + i, -ab, 1};
          table_[size_t(n + i)] = {2 * n + i, -ab, 1};
          table_[size_t(2 * n + i)] = {n + i, -ab, -1};
          table_[size_t(3 * n + i)] = {i, -ab, -1};
          break;
      }
    }
    if (flat)
      for (BasisAction& act : table_) act.lam_power = 0;
  }
};

inline StructureEndo build_structure(StructureKind kind, const Rational& a,
                                     const Rational& b, const Expr& lambda, int n) {
  return StructureEndo(kind, a, b, lambda, n);
}

inline VectorField apply_endo(const StructureEndo& w, const VectorField& x) {
  if (x.dim() != w.dim())
    throw std::invalid_argument("apply_endo: dimension mismatch");
  VectorField out(w.dim());
  for (int k = 0; k < w.dim(); ++k) {
    if (x.component(k).is_zero()) continue;
    const BasisAction& act = w.action(k);
    out.component(act.target) = out.component(act.target) + x.component(k) * w.weight(k);
  }
  return out;
}

// Diagonal +-1 metric on the chart.
class Metric {
 public:
  Metric(int dim, std::vector<int> signs) : signs_(std::move(signs)) {
    if (dim < 1 || signs_.size() != static_cast<size_t>(dim))
      throw std::invalid_argument("Metric: sign list does not match dimension");
    for (int s : signs_)
      if (s != 1 && s != -1) throw std::invalid_argument("Metric: signs must be +1 or -1");
  }

  int dim() const { return static_cast<int>(signs_.size()); }
  int sign(int k) const {
    if (k < 0 || k >= dim()) throw std::out_of_range("Metric: index out of range");
    return signs_[static_cast<size_t>(k)];
  }

  std::string str() const {
    std::string out = "diag(";
    for (int k = 0; k < dim(); ++k) {
      if (k) out += ", ";
      out += signs_[static_cast<size_t>(k)] > 0 ? "+1" : "-1";
    }
    return out + ")";
  }

 private:
  std::vector<int> signs_;
};

// The neutral-signature default: + on the first two blocks, - on the last two.
inline Metric default_metric(int n) {
  std::vector<int> signs(static_cast<size_t>(4 * n));
  for (int k = 0; k < 4 * n; ++k) signs[static_cast<size_t>(k)] = k < 2 * n ? 1 : -1;
  return Metric(4 * n, std::move(signs));
}

// --- relation verification -------------------------------------------------

struct RelationBlockDetail {
  int basis_index;
  int actual_target;
  Expr actual_weight;
  int required_target;
  Expr required_weight;
  std::optional<Expr> ratio;  // actual/required when the targets agree
};

struct RelationCheck {
  std::string name;  // display form, e.g. "F*G = H"
  std::string key;   // short form for machine output, e.g. "FG"
  bool holds = true;
  std::vector<RelationBlockDetail> blocks;  // one representative per block
  std::optional<Expr> uniform_ratio;        // set when every basis vector shares it
};

struct RelationReport {
  int n = 1;
  Rational a, b;
  Expr lambda;
  std::vector<RelationCheck> checks;

  bool all_hold() const {
    for (const RelationCheck& c : checks)
      if (!c.holds) return false;
    return true;
  }

  std::string to_text() const {
    std::string out;
    for (const RelationCheck& c : checks) {
      out += c.name + ": " + (c.holds ? "holds" : "FAILS") + "\n";
      if (c.holds) continue;
      for (const RelationBlockDetail& d : c.blocks) {
        out += "  d/dx" + std::to_string(d.basis_index) + " -> actual " +
               d.actual_weight.str() + "*d/dx" + std::to_string(d.actual_target) +
               ", required " + d.required_weight.str() + "*d/dx" +
               std::to_string(d.required_target);
        if (d.ratio) out += ", ratio " + d.ratio->str();
        out += "\n";
      }
      if (c.uniform_ratio) out += "  uniform ratio: " + c.uniform_ratio->str() + "\n";
    }
    return out;
  }

  std::string to_kv() const {
    std::string out;
    for (const RelationCheck& c : checks) {
      out += "relation." + c.key + ".holds=" + (c.holds ? "true" : "false") + "\n";
      if (c.holds) continue;
      for (size_t bl = 0; bl < c.blocks.size(); ++bl) {
        const RelationBlockDetail& d = c.blocks[bl];
        if (d.ratio)
          out += "relation." + c.key + ".block" + std::to_string(bl) +
                 ".ratio=" + d.ratio->str() + "\n";
      }
      if (c.uniform_ratio)
        out += "relation." + c.key + ".ratio=" + c.uniform_ratio->str() + "\n";
    }
    return out;
  }
};

namespace detail {

struct PairAction {
  int target;
  Expr weight;
};

inline PairAction compose_on_basis(const StructureEndo& outer, const StructureEndo& inner,
                                   int k) {
  const BasisAction& first = inner.action(k);
  return {outer.target(first.target), inner.weight(k) * outer.weight(first.target)};
}

template <typename RequiredFn>
RelationCheck check_relation(const std::string& name, const std::string& key,
                             const StructureEndo& outer, const StructureEndo& inner,
                             RequiredFn required) {
  RelationCheck out;
  out.name = name;
  out.key = key;
  const int n = outer.n();
  std::optional<Expr> shared;
  bool uniform = true;
  for (int k = 0; k < outer.dim(); ++k) {
    PairAction actual = compose_on_basis(outer, inner, k);
    PairAction want = required(k);
    bool target_ok = actual.target == want.target;
    bool weight_ok = target_ok && actual.weight == want.weight;
    if (!(target_ok && weight_ok)) out.holds = false;
    std::optional<Expr> ratio;
    if (target_ok) ratio = actual.weight / want.weight;
    if (!ratio || (shared && *shared != *ratio)) uniform = false;
    if (!shared && ratio) shared = ratio;
    if (k % n == 0)
      out.blocks.push_back({k, actual.target, actual.weight, want.target, want.weight, ratio});
  }
  if (uniform && shared && !out.holds) out.uniform_ratio = shared;
  return out;
}

}  // namespace detail

// Checks the six composition identities the three endomorphisms are supposed
// to satisfy, recording per-block actual/required weights for any failure.
inline RelationReport verify_relations(const Rational& a, const Rational& b,
                                       const Expr& lambda, int n) {
  StructureEndo f(StructureKind::F, a, b, lambda, n);
  StructureEndo g(StructureKind::G, a, b, lambda, n);
  StructureEndo h(StructureKind::H, a, b, lambda, n);

  RelationReport report;
  report.n = n;
  report.a = a;
  report.b = b;
  report.lambda = lambda;

  report.checks.push_back(detail::check_relation(
      "F^2 = -a*I", "F2", f, f,
      [&](int k) { return detail::PairAction{k, Expr::constant(-a)}; }));
  report.checks.push_back(detail::check_relation(
      "G^2 = -b*I", "G2", g, g,
      [&](int k) { return detail::PairAction{k, Expr::constant(-b)}; }));
  report.checks.push_back(detail::check_relation(
      "H^2 = -a*b*I", "H2", h, h,
      [&](int k) { return detail::PairAction{k, Expr::constant(-(a * b))}; }));
  report.checks.push_back(detail::check_relation(
      "F*G = H", "FG", f, g,
      [&](int k) { return detail::PairAction{h.target(k), h.weight(k)}; }));
  report.checks.push_back(detail::check_relation(
      "G*H = b*F", "GH", g, h,
      [&](int k) { return detail::PairAction{f.target(k), f.weight(k).scaled(b)}; }));
  report.checks.push_back(detail::check_relation(
      "H*F = a*G", "HF", h, f,
      [&](int k) { return detail::PairAction{g.target(k), g.weight(k).scaled(a)}; }));
  return report;
}

// --- metric compatibility ----------------------------------------------------

struct CompatibilityPair {
  int j, k;
  Rational lhs, rhs;
};

struct CompatibilityReport {
  StructureKind kind;
  Rational required_coefficient;
  int pairs_checked = 0;
  std::vector<CompatibilityPair> failures;

  bool holds() const { return failures.empty(); }
};

// g(WX, WY) = c * g(X, Y) on all basis pairs, with c the kind's parameter.
// Only defined for non-conformal actions; a conformal weight has no single
// rational value to compare against.
inline CompatibilityReport check_compatibility(const StructureEndo& w, const Metric& g) {
  if (w.conformal())
    throw std::invalid_argument(
        "check_compatibility: not defined for conformal actions (lam != 0)");
  if (g.dim() != w.dim())
    throw std::invalid_argument("check_compatibility: dimension mismatch");

  Rational c;
  switch (w.kind()) {
    case StructureKind::F: c = w.a(); break;
    case StructureKind::G: c = w.b(); break;
    case StructureKind::H: c = w.a() * w.b(); break;
  }

  CompatibilityReport report{w.kind(), c, 0, {}};
  for (int j = 0; j < w.dim(); ++j) {
    for (int k = 0; k < w.dim(); ++k) {
      const BasisAction& aj = w.action(j);
      const BasisAction& ak = w.action(k);
      Rational lhs = aj.target == ak.target
                         ? aj.factor * ak.factor * Rational(g.sign(aj.target))
                         : Rational(0);
      Rational rhs = j == k ? c * Rational(g.sign(j)) : Rational(0);
      ++report.pairs_checked;
      if (lhs != rhs) report.failures.push_back({j, k, lhs, rhs});
    }
  }
  return report;
}

// --- fundamental two-form ----------------------------------------------------

struct KahlerResult {
  DifferentialForm form;
  bool closed;
};

// Q(X, Y) built from g(X, WY), antisymmetrized entrywise; with conformal
// weights the raw matrix g(d/dxj, W d/dxk) need not be antisymmetric, so the
// skew part is what defines the form.
inline KahlerResult kahler_form(const Metric& g, const StructureEndo& w) {
  if (g.dim() != w.dim())
    throw std::invalid_argument("kahler_form: dimension mismatch");
  const int dim = w.dim();
  DifferentialForm q(dim, 2);
  auto entry = [&](int j, int k) {
    // g(d/dxj, W d/dxk)
    const BasisAction& act = w.action(k);
    if (act.target != j) return Expr();
    return w.weight(k).scaled(Rational(g.sign(j)));
  };
  for (int j = 0; j < dim; ++j)
    for (int k = j + 1; k < dim; ++k) {
      Expr c = (entry(j, k) - entry(k, j)).scaled(Rational(1, 2));
      q.set_coefficient({j, k}, c);
    }
  bool closed = ext_d(q, w.lambda()).is_zero();
  return {std::move(q), closed};
}

}  // namespace confel
