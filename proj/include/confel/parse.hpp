#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "confel/chart.hpp"
#include "confel/expr.hpp"

namespace confel {

// Syntax or range error in expression text; position is the zero-based
// character offset the parser was looking at.
struct ParseError : std::runtime_error {
  size_t position;
  ParseError(const std::string& msg, size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
        position(pos) {}
};

namespace detail {

class ExprParser {
 public:
  ExprParser(std::string_view text, int var_limit) : s_(text), limit_(var_limit) {}

  Expr run() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  std::string_view s_;
  size_t pos_ = 0;
  int limit_;  // variable indices must be < limit_

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!consume(c)) fail(std::string("expected ") + what);
  }

  Expr parse_sum() {
    Expr e = parse_term();
    for (;;) {
      char c = peek();
      if (c == '+') {
        ++pos_;
        e = e + parse_term();
      } else if (c == '-') {
        ++pos_;
        e = e - parse_term();
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      char c = peek();
      if (c == '*') {
        ++pos_;
        e = e * parse_factor();
      } else if (c == '/') {
        size_t at = pos_++;
        Expr d = parse_factor();
        try {
          e = e / d;
        } catch (const std::domain_error& err) {
          throw ParseError(err.what(), at);
        }
      } else {
        return e;
      }
    }
  }

  Expr parse_factor() {
    Expr base = parse_base();
    if (peek() == '^') {
      size_t at = pos_++;
      int k = parse_signed_int();
      try {
        return base.pow(k);
      } catch (const std::domain_error& err) {
        throw ParseError(err.what(), at);
      }
    }
    return base;
  }

  Expr parse_base() {
    char c = peek();
    if (c == '-') {
      ++pos_;
      return -parse_base();
    }
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      expect(')', "')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_symbol();
    fail("expected a number, coordinate, function, or '('");
  }

  Expr parse_symbol() {
    size_t start = pos_;
    std::string name;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_])))
      name += s_[pos_++];
    if (name == "x") return parse_coordinate(start);
    if (name == "lam") return Expr::lambda();
    if (name == "exp" || name == "sin" || name == "cos") {
      expect('(', "'(' after function name");
      Expr arg = parse_sum();
      expect(')', "')'");
      if (name == "exp") return Expr::exp_of(std::move(arg));
      if (name == "sin") return Expr::sin_of(std::move(arg));
      return Expr::cos_of(std::move(arg));
    }
    pos_ = start;
    fail("unknown symbol '" + name + "'");
  }

  Expr parse_coordinate(size_t start) {
    bool bracket = false;
    if (pos_ < s_.size() && s_[pos_] == '[') {
      bracket = true;
      ++pos_;
      skip_ws();
    }
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      pos_ = start;
      fail("expected a coordinate index after 'x'");
    }
    long long idx = parse_unsigned_int();
    if (bracket) expect(']', "']'");
    if (idx >= limit_)
      throw ParseError("coordinate index x" + std::to_string(idx) +
                           " outside this chart (dimension " + std::to_string(limit_) + ")",
                       start);
    return Expr::var(static_cast<int>(idx));
  }

  long long parse_unsigned_int() {
    size_t start = pos_;
    long long v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > 100000000000000000LL) throw ParseError("integer literal too large", start);
      ++pos_;
    }
    if (pos_ == start) fail("expected an integer");
    return v;
  }

  int parse_signed_int() {
    skip_ws();
    size_t start = pos_;
    bool neg = false;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
      neg = s_[pos_] == '-';
      ++pos_;
    }
    long long v = parse_unsigned_int();
    if (v > 1000000) throw ParseError("integer exponent too large", start);
    return static_cast<int>(neg ? -v : v);
  }

  // number := digits ['.' digits] [('e'|'E') ['+'|'-'] digits], read exactly.
  Expr parse_number() {
    size_t start = pos_;
    Rational value(parse_unsigned_int());
    try {
      if (pos_ < s_.size() && s_[pos_] == '.') {
        ++pos_;
        size_t fs = pos_;
        long long frac = parse_unsigned_int();
        int digits = static_cast<int>(pos_ - fs);
        value = value + Rational(frac) / Rational(10).pow(digits);
      }
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        ++pos_;
        int ex = parse_signed_int();
        value = value * Rational(10).pow(ex);
      }
    } catch (const std::overflow_error&) {
      throw ParseError("number literal too large to represent exactly", start);
    }
    return Expr::constant(value);
  }
};

}  // namespace detail

// Parse expression text over the chart's coordinates (plus their velocity
// symbols; indices up to 8n-1 are accepted).
inline Expr parse_expr(std::string_view text, const Chart& chart) {
  return detail::ExprParser(text, 2 * chart.dim()).run();
}

// Parse with an explicit bound on usable variable indices.
inline Expr parse_expr(std::string_view text, int var_limit) {
  return detail::ExprParser(text, var_limit).run();
}

}  // namespace confel
