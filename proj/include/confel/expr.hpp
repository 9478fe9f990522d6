#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "confel/rational.hpp"

namespace confel {

class Expr;
using ExprHandle = std::shared_ptr<const Expr>;

// A symbolic expression is kept as a canonical sum of monomials: each term is
// a rational coefficient times a sorted product of atom powers. Two
// expressions are equal exactly when their canonical forms coincide. The
// normalizer knows three identities beyond plain merging:
//   exp(k*lam)  is stored as a dedicated atom power, so exp(lam)*exp(-lam)
//               cancels exactly;
//   sin(u)^k    for k >= 2 is rewritten through sin^2 = 1 - cos^2, so squared
//               sines never survive in canonical form;
//   exp/sin/cos of literal zero collapse to their constant values.
// exp(u)*exp(v) for distinct general arguments stays split; equality is
// structural on the canonical form, not a full transcendental decision
// procedure.
enum class AtomKind : uint8_t { Var, Lambda, ExpLambda, Exp, Sin, Cos };

struct Atom {
  AtomKind kind;
  int index = -1;   // Var only
  ExprHandle arg;   // Exp, Sin, Cos only
};

struct Factor {
  Atom atom;
  int exponent = 1;  // never zero in canonical form
};

// Factors sorted by atom order; an empty list means the constant 1.
struct Monomial {
  std::vector<Factor> factors;
};

struct Term {
  Rational coef;  // never zero in canonical form
  Monomial mono;
};

int compare(const Expr& a, const Expr& b);

inline int compare(const Atom& a, const Atom& b) {
  if (a.kind != b.kind)
    return static_cast<int>(a.kind) < static_cast<int>(b.kind) ? -1 : 1;
  switch (a.kind) {
    case AtomKind::Var:
      return a.index < b.index ? -1 : (a.index > b.index ? 1 : 0);
    case AtomKind::Lambda:
    case AtomKind::ExpLambda:
      return 0;
    default:
      return compare(*a.arg, *b.arg);
  }
}

inline int compare(const Monomial& a, const Monomial& b) {
  size_t m = std::min(a.factors.size(), b.factors.size());
  for (size_t i = 0; i < m; ++i) {
    int c = compare(a.factors[i].atom, b.factors[i].atom);
    if (c != 0) return c;
    if (a.factors[i].exponent != b.factors[i].exponent)
      return a.factors[i].exponent < b.factors[i].exponent ? -1 : 1;
  }
  if (a.factors.size() != b.factors.size())
    return a.factors.size() < b.factors.size() ? -1 : 1;
  return 0;
}

// How to render variable indices; indices at or above velocity_base print as
// xdot<k> instead of x<index>. Used by the derivation reports, never by the
// canonical printer that feeds back into the parser.
struct PrintOptions {
  int velocity_base = -1;
};

class Expr {
 public:
  Expr() = default;  // zero

  static Expr constant(const Rational& c) {
    Expr e;
    if (!c.is_zero()) e.terms_.push_back(Term{c, {}});
    return e;
  }
  static Expr integer(long long v) { return constant(Rational(v)); }
  static Expr one() { return integer(1); }

  static Expr var(int index) {
    if (index < 0) throw std::invalid_argument("Expr::var: negative index");
    return from_atom(Atom{AtomKind::Var, index, nullptr});
  }
  static Expr lambda() { return from_atom(Atom{AtomKind::Lambda, -1, nullptr}); }

  static Expr exp_lambda(int power = 1) {
    if (power == 0) return one();
    Expr e;
    e.terms_.push_back(
        Term{Rational(1), Monomial{{Factor{Atom{AtomKind::ExpLambda, -1, nullptr}, power}}}});
    return e;
  }

  static Expr exp_of(Expr arg) {
    if (arg.is_zero()) return one();
    // exp of an integer multiple of lam becomes a tracked weight power.
    if (arg.terms_.size() == 1) {
      const Term& t = arg.terms_.front();
      if (t.mono.factors.size() == 1 && t.coef.is_integer()) {
        const Factor& f = t.mono.factors.front();
        if (f.atom.kind == AtomKind::Lambda && f.exponent == 1)
          return exp_lambda(static_cast<int>(t.coef.numerator()));
      }
    }
    return from_atom(Atom{AtomKind::Exp, -1, make_handle(std::move(arg))});
  }

  static Expr sin_of(Expr arg) {
    if (arg.is_zero()) return Expr();
    return from_atom(Atom{AtomKind::Sin, -1, make_handle(std::move(arg))});
  }

  static Expr cos_of(Expr arg) {
    if (arg.is_zero()) return one();
    return from_atom(Atom{AtomKind::Cos, -1, make_handle(std::move(arg))});
  }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.front().mono.factors.empty());
  }
  Rational constant_value() const {
    if (terms_.empty()) return Rational(0);
    if (!is_constant()) throw std::logic_error("Expr: not a constant");
    return terms_.front().coef;
  }
  bool is_monomial() const { return terms_.size() == 1; }
  const std::vector<Term>& terms() const { return terms_; }

  bool depends_on_lambda() const {
    for (const Term& t : terms_)
      for (const Factor& f : t.mono.factors) {
        if (f.atom.kind == AtomKind::Lambda || f.atom.kind == AtomKind::ExpLambda) return true;
        if (f.atom.arg && f.atom.arg->depends_on_lambda()) return true;
      }
    return false;
  }

  bool depends_on_var(int index) const {
    for (const Term& t : terms_)
      for (const Factor& f : t.mono.factors) {
        if (f.atom.kind == AtomKind::Var && f.atom.index == index) return true;
        if (f.atom.arg && f.atom.arg->depends_on_var(index)) return true;
      }
    return false;
  }

  int max_var_index() const {
    int m = -1;
    for (const Term& t : terms_)
      for (const Factor& f : t.mono.factors) {
        if (f.atom.kind == AtomKind::Var) m = std::max(m, f.atom.index);
        if (f.atom.arg) m = std::max(m, f.atom.arg->max_var_index());
      }
    return m;
  }

  friend Expr operator+(const Expr& a, const Expr& b) {
    Expr out;
    out.terms_.reserve(a.terms_.size() + b.terms_.size());
    size_t i = 0, j = 0;
    while (i < a.terms_.size() && j < b.terms_.size()) {
      int c = compare(a.terms_[i].mono, b.terms_[j].mono);
      if (c < 0) {
        out.terms_.push_back(a.terms_[i++]);
      } else if (c > 0) {
        out.terms_.push_back(b.terms_[j++]);
      } else {
        Rational s = a.terms_[i].coef + b.terms_[j].coef;
        if (!s.is_zero()) out.terms_.push_back(Term{s, a.terms_[i].mono});
        ++i;
        ++j;
      }
    }
    for (; i < a.terms_.size(); ++i) out.terms_.push_back(a.terms_[i]);
    for (; j < b.terms_.size(); ++j) out.terms_.push_back(b.terms_[j]);
    return out;
  }

  friend Expr operator-(const Expr& a) {
    Expr out = a;
    for (Term& t : out.terms_) t.coef = -t.coef;
    return out;
  }
  friend Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

  friend Expr operator*(const Expr& a, const Expr& b) {
    std::vector<Term> raw;
    raw.reserve(a.terms_.size() * b.terms_.size());
    for (const Term& ta : a.terms_)
      for (const Term& tb : b.terms_)
        raw.push_back(Term{ta.coef * tb.coef, mul_monomials(ta.mono, tb.mono)});
    return from_terms(std::move(raw));
  }

  Expr scaled(const Rational& c) const {
    if (c.is_zero()) return Expr();
    Expr out = *this;
    for (Term& t : out.terms_) t.coef = t.coef * c;
    return out;
  }

  // Integer power; 0^0 is taken to be 1. Negative exponents require a
  // single-term base (a monomial), since only those have monomial inverses.
  Expr pow(int k) const {
    if (k == 0) return one();
    if (k < 0) return inverted_monomial().pow(-k);
    Expr result = one();
    Expr base = *this;
    int e = k;
    while (e > 0) {
      if (e & 1) result = result * base;
      if (e > 1) base = base * base;
      e >>= 1;
    }
    return result;
  }

  friend Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero()) throw std::domain_error("division by zero");
    return a * b.inverted_monomial();
  }

  friend bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }
  friend bool operator!=(const Expr& a, const Expr& b) { return compare(a, b) != 0; }

  std::string str() const { return str(PrintOptions{}); }

  std::string str(const PrintOptions& opts) const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const Term& t : terms_) {
      Rational c = t.coef;
      bool neg = c.negative();
      if (first) {
        if (neg) out += '-';
      } else {
        out += neg ? " - " : " + ";
      }
      if (neg) c = -c;
      // A leading minus would swallow a power on the first factor when the
      // text is parsed back ("-x0^2" reads as (-x0)^2), so force an explicit
      // coefficient in that corner.
      bool guard = first && neg && c.is_one() && !t.mono.factors.empty() &&
                   t.mono.factors.front().exponent != 1;
      append_term(out, c, t.mono, guard, opts);
      first = false;
    }
    return out;
  }

  // Canonical construction from an arbitrary term list: rewrites squared
  // sines, sorts, merges equal monomials, and drops zero coefficients.
  static Expr from_terms(std::vector<Term> raw) {
    std::vector<Term> flat;
    flat.reserve(raw.size());
    for (Term& t : raw) {
      if (t.coef.is_zero()) continue;
      reduce_sin(std::move(t), flat);
    }
    std::sort(flat.begin(), flat.end(),
              [](const Term& x, const Term& y) { return compare(x.mono, y.mono) < 0; });
    Expr out;
    for (Term& t : flat) {
      if (!out.terms_.empty() && compare(out.terms_.back().mono, t.mono) == 0) {
        Rational s = out.terms_.back().coef + t.coef;
        if (s.is_zero())
          out.terms_.pop_back();
        else
          out.terms_.back().coef = s;
      } else {
        out.terms_.push_back(std::move(t));
      }
    }
    return out;
  }

 private:
  std::vector<Term> terms_;

  static ExprHandle make_handle(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

  static Expr from_atom(Atom a) {
    Expr e;
    e.terms_.push_back(Term{Rational(1), Monomial{{Factor{std::move(a), 1}}}});
    return e;
  }

  static Monomial mul_monomials(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.factors.reserve(a.factors.size() + b.factors.size());
    size_t i = 0, j = 0;
    while (i < a.factors.size() && j < b.factors.size()) {
      int c = compare(a.factors[i].atom, b.factors[j].atom);
      if (c < 0) {
        out.factors.push_back(a.factors[i++]);
      } else if (c > 0) {
        out.factors.push_back(b.factors[j++]);
      } else {
        int e = a.factors[i].exponent + b.factors[j].exponent;
        if (e != 0) out.factors.push_back(Factor{a.factors[i].atom, e});
        ++i;
        ++j;
      }
    }
    for (; i < a.factors.size(); ++i) out.factors.push_back(a.factors[i]);
    for (; j < b.factors.size(); ++j) out.factors.push_back(b.factors[j]);
    return out;
  }

  // sin(u)^k with k >= 2 -> sin(u)^{k-2} - sin(u)^{k-2} * cos(u)^2, applied
  // until no squared sine remains. Negative sine powers are left alone.
  static void reduce_sin(Term t, std::vector<Term>& out) {
    for (size_t i = 0; i < t.mono.factors.size(); ++i) {
      const Factor& f = t.mono.factors[i];
      if (f.atom.kind != AtomKind::Sin || f.exponent < 2) continue;
      Atom cos_atom{AtomKind::Cos, -1, f.atom.arg};
      Term lower = t;
      lower.mono.factors[i].exponent -= 2;
      if (lower.mono.factors[i].exponent == 0)
        lower.mono.factors.erase(lower.mono.factors.begin() + static_cast<long>(i));
      Term shifted = lower;
      shifted.coef = -shifted.coef;
      shifted.mono = mul_monomials(shifted.mono,
                                   Monomial{{Factor{std::move(cos_atom), 2}}});
      reduce_sin(std::move(lower), out);
      reduce_sin(std::move(shifted), out);
      return;
    }
    out.push_back(std::move(t));
  }

  Expr inverted_monomial() const {
    if (terms_.size() != 1)
      throw std::domain_error("division by a non-monomial expression");
    Expr out;
    Term t = terms_.front();
    t.coef = t.coef.inverse();
    for (Factor& f : t.mono.factors) f.exponent = -f.exponent;
    out.terms_.push_back(std::move(t));
    return out;
  }

  static void append_atom(std::string& out, const Atom& a, const PrintOptions& opts) {
    switch (a.kind) {
      case AtomKind::Var:
        if (opts.velocity_base >= 0 && a.index >= opts.velocity_base)
          out += "xdot" + std::to_string(a.index - opts.velocity_base);
        else
          out += "x" + std::to_string(a.index);
        break;
      case AtomKind::Lambda:
        out += "lam";
        break;
      case AtomKind::ExpLambda:
        out += "exp(lam)";
        break;
      case AtomKind::Exp:
        out += "exp(" + a.arg->str(opts) + ")";
        break;
      case AtomKind::Sin:
        out += "sin(" + a.arg->str(opts) + ")";
        break;
      case AtomKind::Cos:
        out += "cos(" + a.arg->str(opts) + ")";
        break;
    }
  }

  static void append_term(std::string& out, const Rational& c, const Monomial& m,
                          bool force_coef, const PrintOptions& opts) {
    if (m.factors.empty()) {
      out += c.str();
      return;
    }
    if (!c.is_one() || force_coef) {
      out += c.str();
      out += '*';
    }
    bool first = true;
    for (const Factor& f : m.factors) {
      if (!first) out += '*';
      append_atom(out, f.atom, opts);
      if (f.exponent != 1) out += '^' + std::to_string(f.exponent);
      first = false;
    }
  }
};

inline int compare(const Expr& a, const Expr& b) {
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  size_t m = std::min(ta.size(), tb.size());
  for (size_t i = 0; i < m; ++i) {
    int c = compare(ta[i].mono, tb[i].mono);
    if (c != 0) return c;
    if (ta[i].coef != tb[i].coef) return ta[i].coef < tb[i].coef ? -1 : 1;
  }
  if (ta.size() != tb.size()) return ta.size() < tb.size() ? -1 : 1;
  return 0;
}

namespace detail {

// The term with factor i's exponent lowered by one (or kept, for the atoms
// whose derivative reproduces the same power).
inline Expr rest_term(const Term& t, size_t i, bool lower) {
  Term r = t;
  if (lower) {
    r.mono.factors[i].exponent -= 1;
    if (r.mono.factors[i].exponent == 0)
      r.mono.factors.erase(r.mono.factors.begin() + static_cast<long>(i));
  }
  return Expr::from_terms({std::move(r)});
}

}  // namespace detail

// Partial derivative with respect to coordinate `index`. The third argument
// binds the symbol lam to a concrete (lam-free) expression so the chain rule
// can run through lam and exp(lam) atoms.
inline Expr diff(const Expr& e, int index, const Expr& lam) {
  if (lam.depends_on_lambda())
    throw std::invalid_argument("diff: lam binding must not itself depend on lam");
  Expr dlam = lam.is_zero() ? Expr() : diff(lam, index, Expr());
  Expr acc;
  for (const Term& t : e.terms()) {
    for (size_t i = 0; i < t.mono.factors.size(); ++i) {
      const Factor& f = t.mono.factors[i];
      int k = f.exponent;
      switch (f.atom.kind) {
        case AtomKind::Var: {
          if (f.atom.index != index) break;
          acc = acc + detail::rest_term(t, i, true).scaled(Rational(k));
          break;
        }
        case AtomKind::Lambda: {
          if (dlam.is_zero()) break;
          acc = acc + detail::rest_term(t, i, true).scaled(Rational(k)) * dlam;
          break;
        }
        case AtomKind::ExpLambda: {
          if (dlam.is_zero()) break;
          acc = acc + detail::rest_term(t, i, false).scaled(Rational(k)) * dlam;
          break;
        }
        case AtomKind::Exp: {
          Expr du = diff(*f.atom.arg, index, lam);
          if (du.is_zero()) break;
          acc = acc + detail::rest_term(t, i, false).scaled(Rational(k)) * du;
          break;
        }
        case AtomKind::Sin: {
          Expr du = diff(*f.atom.arg, index, lam);
          if (du.is_zero()) break;
          Expr cosu = Expr::cos_of(*f.atom.arg);
          acc = acc + detail::rest_term(t, i, true).scaled(Rational(k)) * cosu * du;
          break;
        }
        case AtomKind::Cos: {
          Expr du = diff(*f.atom.arg, index, lam);
          if (du.is_zero()) break;
          Expr sinu = Expr::sin_of(*f.atom.arg);
          acc = acc - detail::rest_term(t, i, true).scaled(Rational(k)) * sinu * du;
          break;
        }
      }
    }
  }
  return acc;
}

// Derivative of a lam-free expression; refuses anything that mentions lam.
inline Expr diff(const Expr& e, int index) {
  if (e.depends_on_lambda())
    throw std::invalid_argument("diff: expression depends on lam; supply a lam binding");
  return diff(e, index, Expr());
}

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double ipow(double base, int e) {
  if (e < 0) return 1.0 / ipow(base, -e);
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

inline double eval_core(const Expr& e, std::span<const double> pt, double lam_value) {
  double total = 0.0;
  for (const Term& t : e.terms()) {
    double v = t.coef.to_double();
    for (const Factor& f : t.mono.factors) {
      switch (f.atom.kind) {
        case AtomKind::Var:
          if (static_cast<size_t>(f.atom.index) >= pt.size())
            throw EvalError("evaluation point has no entry for variable x" +
                            std::to_string(f.atom.index));
          v *= ipow(pt[static_cast<size_t>(f.atom.index)], f.exponent);
          break;
        case AtomKind::Lambda:
          v *= ipow(lam_value, f.exponent);
          break;
        case AtomKind::ExpLambda:
          v *= std::exp(lam_value * f.exponent);
          break;
        case AtomKind::Exp:
          v *= std::exp(eval_core(*f.atom.arg, pt, lam_value) * f.exponent);
          break;
        case AtomKind::Sin:
          v *= ipow(std::sin(eval_core(*f.atom.arg, pt, lam_value)), f.exponent);
          break;
        case AtomKind::Cos:
          v *= ipow(std::cos(eval_core(*f.atom.arg, pt, lam_value)), f.exponent);
          break;
      }
    }
    total += v;
  }
  return total;
}

}  // namespace detail

// Numeric evaluation with lam bound to a (lam-free) expression of the same
// coordinates. Non-finite results throw EvalError.
inline double eval(const Expr& e, std::span<const double> point, const Expr& lam) {
  if (lam.depends_on_lambda())
    throw std::invalid_argument("eval: lam binding must not itself depend on lam");
  double lam_value = detail::eval_core(lam, point, 0.0);
  if (!std::isfinite(lam_value)) throw EvalError("lam evaluated to a non-finite value");
  double r = detail::eval_core(e, point, lam_value);
  if (!std::isfinite(r)) throw EvalError("evaluation produced a non-finite value");
  return r;
}

inline double eval(const Expr& e, std::span<const double> point) {
  if (e.depends_on_lambda())
    throw std::invalid_argument("eval: expression depends on lam; supply a lam binding");
  double r = detail::eval_core(e, point, 0.0);
  if (!std::isfinite(r)) throw EvalError("evaluation produced a non-finite value");
  return r;
}

}  // namespace confel
