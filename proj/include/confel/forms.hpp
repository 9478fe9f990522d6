#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "confel/expr.hpp"

namespace confel {

// Vector field with symbolic components in the chart coordinates.
class VectorField {
 public:
  explicit VectorField(int dim) : components_(static_cast<size_t>(check_dim(dim))) {}
  VectorField(int dim, std::vector<Expr> components)
      : components_(std::move(components)) {
    check_dim(dim);
    if (components_.size() != static_cast<size_t>(dim))
      throw std::invalid_argument("VectorField: component count does not match dimension");
  }

  static VectorField basis(int dim, int k) {
    VectorField v(dim);
    v.component(k) = Expr::one();
    return v;
  }

  int dim() const { return static_cast<int>(components_.size()); }
  const Expr& component(int k) const { return components_[checked(k)]; }
  Expr& component(int k) { return components_[checked(k)]; }

  bool is_zero() const {
    for (const Expr& c : components_)
      if (!c.is_zero()) return false;
    return true;
  }

  friend VectorField operator+(const VectorField& a, const VectorField& b) {
    if (a.dim() != b.dim())
      throw std::invalid_argument("VectorField: dimension mismatch");
    VectorField out(a.dim());
    for (int k = 0; k < a.dim(); ++k) out.component(k) = a.component(k) + b.component(k);
    return out;
  }

  VectorField scaled(const Expr& s) const {
    VectorField out(dim());
    for (int k = 0; k < dim(); ++k) out.component(k) = component(k) * s;
    return out;
  }

  friend bool operator==(const VectorField& a, const VectorField& b) {
    if (a.dim() != b.dim()) return false;
    for (int k = 0; k < a.dim(); ++k)
      if (a.component(k) != b.component(k)) return false;
    return true;
  }

 private:
  std::vector<Expr> components_;

  static int check_dim(int dim) {
    if (dim < 1) throw std::invalid_argument("VectorField: dimension must be positive");
    return dim;
  }
  size_t checked(int k) const {
    if (k < 0 || k >= dim())
      throw std::out_of_range("VectorField: component index out of range");
    return static_cast<size_t>(k);
  }
};

// Differential p-form stored sparsely: strictly increasing index tuples
// mapped to symbolic coefficients. Zero coefficients are never stored.
class DifferentialForm {
 public:
  DifferentialForm(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 1) throw std::invalid_argument("DifferentialForm: dimension must be positive");
    if (degree < 0) throw std::invalid_argument("DifferentialForm: negative degree");
  }

  static DifferentialForm scalar(int dim, Expr value) {
    DifferentialForm f(dim, 0);
    f.accumulate({}, std::move(value));
    return f;
  }

  static DifferentialForm basis_covector(int dim, int k) {
    DifferentialForm f(dim, 1);
    f.set_coefficient({k}, Expr::one());
    return f;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::map<std::vector<int>, Expr>& coefficients() const { return coef_; }
  bool is_zero() const { return coef_.empty(); }

  Expr coefficient(const std::vector<int>& key) const {
    validate_key(key);
    auto it = coef_.find(key);
    return it == coef_.end() ? Expr() : it->second;
  }

  void set_coefficient(const std::vector<int>& key, Expr value) {
    validate_key(key);
    if (value.is_zero())
      coef_.erase(key);
    else
      coef_[key] = std::move(value);
  }

  // Adds value on an arbitrary tuple of distinct indices, folding in the
  // sign of the permutation that sorts it. Tuples with a repeated index
  // contribute nothing.
  void add_term(std::vector<int> key, Expr value) {
    if (static_cast<int>(key.size()) != degree_)
      throw std::invalid_argument("DifferentialForm: tuple length does not match degree");
    int sign = 1;
    for (size_t i = 1; i < key.size(); ++i) {
      size_t j = i;
      while (j > 0 && key[j - 1] > key[j]) {
        std::swap(key[j - 1], key[j]);
        sign = -sign;
        --j;
      }
    }
    for (size_t i = 1; i < key.size(); ++i)
      if (key[i] == key[i - 1]) return;
    accumulate(key, sign < 0 ? -value : std::move(value));
  }

  friend DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b) {
    a.require_compatible(b);
    DifferentialForm out = a;
    for (const auto& [key, value] : b.coef_) out.accumulate(key, value);
    return out;
  }
  friend DifferentialForm operator-(const DifferentialForm& a) {
    DifferentialForm out = a;
    for (auto& [key, value] : out.coef_) value = -value;
    return out;
  }
  friend DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b) {
    return a + (-b);
  }

  DifferentialForm scaled(const Expr& s) const {
    DifferentialForm out(dim_, degree_);
    for (const auto& [key, value] : coef_) out.accumulate(key, value * s);
    return out;
  }

  friend bool operator==(const DifferentialForm& a, const DifferentialForm& b) {
    if (a.dim_ != b.dim_ || a.degree_ != b.degree_) return false;
    if (a.coef_.size() != b.coef_.size()) return false;
    auto ia = a.coef_.begin();
    auto ib = b.coef_.begin();
    for (; ia != a.coef_.end(); ++ia, ++ib)
      if (ia->first != ib->first || ia->second != ib->second) return false;
    return true;
  }

  std::string str() const { return str(PrintOptions{}); }

  std::string str(const PrintOptions& opts) const {
    if (coef_.empty()) return "0";
    if (degree_ == 0) return coef_.begin()->second.str(opts);
    std::string out;
    bool first = true;
    for (const auto& [key, value] : coef_) {
      if (!first) out += " + ";
      if (!value.is_constant() || !value.constant_value().is_one()) {
        out += "(" + value.str(opts) + ")*";
      }
      bool inner_first = true;
      for (int k : key) {
        if (!inner_first) out += '^';
        out += "dx" + std::to_string(k);
        inner_first = false;
      }
      first = false;
    }
    return out;
  }

  // Low-level accumulation used by the exterior operations; key must already
  // be sorted strictly increasing.
  void require_compatible(const DifferentialForm& other) const {
    if (dim_ != other.dim_)
      throw std::invalid_argument("DifferentialForm: dimension mismatch");
    if (degree_ != other.degree_)
      throw std::invalid_argument("DifferentialForm: degree mismatch");
  }

  void accumulate(const std::vector<int>& key, Expr value) {
    if (value.is_zero()) return;
    auto it = coef_.find(key);
    if (it == coef_.end()) {
      coef_.emplace(key, std::move(value));
    } else {
      it->second = it->second + value;
      if (it->second.is_zero()) coef_.erase(it);
    }
  }

 private:
  int dim_;
  int degree_;
  std::map<std::vector<int>, Expr> coef_;

  void validate_key(const std::vector<int>& key) const {
    if (static_cast<int>(key.size()) != degree_)
      throw std::invalid_argument("DifferentialForm: tuple length does not match degree");
    for (size_t i = 0; i < key.size(); ++i) {
      if (key[i] < 0 || key[i] >= dim_)
        throw std::out_of_range("DifferentialForm: index out of range");
      if (i > 0 && key[i - 1] >= key[i])
        throw std::invalid_argument("DifferentialForm: tuple must be strictly increasing");
    }
  }
};

inline DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("wedge: dimension mismatch");
  DifferentialForm out(a.dim(), a.degree() + b.degree());
  for (const auto& [ka, ca] : a.coefficients()) {
    for (const auto& [kb, cb] : b.coefficients()) {
      // Merge the two sorted tuples, counting transpositions; a shared index
      // kills the term.
      std::vector<int> merged;
      merged.reserve(ka.size() + kb.size());
      size_t i = 0, j = 0;
      int sign = 1;
      bool dead = false;
      while (i < ka.size() && j < kb.size()) {
        if (ka[i] == kb[j]) {
          dead = true;
          break;
        }
        if (ka[i] < kb[j]) {
          merged.push_back(ka[i++]);
        } else {
          if ((ka.size() - i) % 2 == 1) sign = -sign;
          merged.push_back(kb[j++]);
        }
      }
      if (dead) continue;
      for (; i < ka.size(); ++i) merged.push_back(ka[i]);
      for (; j < kb.size(); ++j) merged.push_back(kb[j]);
      Expr v = ca * cb;
      out.accumulate(merged, sign < 0 ? -v : std::move(v));
    }
  }
  return out;
}

// Exterior derivative; lam gives the conformal factor binding used when
// coefficients mention lam.
inline DifferentialForm ext_d(const DifferentialForm& form, const Expr& lam) {
  DifferentialForm out(form.dim(), form.degree() + 1);
  for (const auto& [key, value] : form.coefficients()) {
    for (int k = 0; k < form.dim(); ++k) {
      Expr dk = diff(value, k, lam);
      if (dk.is_zero()) continue;
      auto pos = std::lower_bound(key.begin(), key.end(), k);
      if (pos != key.end() && *pos == k) continue;  // dx_k repeats, term dies
      std::vector<int> merged;
      merged.reserve(key.size() + 1);
      merged.insert(merged.end(), key.begin(), pos);
      merged.push_back(k);
      merged.insert(merged.end(), pos, key.end());
      int sign = (pos - key.begin()) % 2 == 0 ? 1 : -1;
      out.accumulate(merged, sign < 0 ? -dk : std::move(dk));
    }
  }
  return out;
}

inline DifferentialForm ext_d(const DifferentialForm& form) {
  for (const auto& [key, value] : form.coefficients())
    if (value.depends_on_lambda())
      throw std::invalid_argument("ext_d: coefficients depend on lam; supply a lam binding");
  return ext_d(form, Expr());
}

// Interior product (contraction in the first slot) with a vector field.
inline DifferentialForm interior(const VectorField& x, const DifferentialForm& form) {
  if (x.dim() != form.dim())
    throw std::invalid_argument("interior: dimension mismatch");
  if (form.degree() < 1)
    throw std::invalid_argument("interior: form must have degree at least 1");
  DifferentialForm out(form.dim(), form.degree() - 1);
  for (const auto& [key, value] : form.coefficients()) {
    for (size_t m = 0; m < key.size(); ++m) {
      const Expr& comp = x.component(key[m]);
      if (comp.is_zero()) continue;
      std::vector<int> rest;
      rest.reserve(key.size() - 1);
      for (size_t r = 0; r < key.size(); ++r)
        if (r != m) rest.push_back(key[r]);
      Expr v = comp * value;
      out.accumulate(rest, m % 2 == 1 ? -v : std::move(v));
    }
  }
  return out;
}

}  // namespace confel
