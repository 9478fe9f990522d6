#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace confel {

// Exact rational arithmetic on 64-bit words. Every value is kept normalized
// (reduced, positive denominator). Intermediates are widened to 128 bits and
// any result that does not fit back into 64 bits throws std::overflow_error
// rather than wrapping silently.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}
  Rational(int n) : num_(n), den_(1) {}
  Rational(long long n, long long d) { assign(n, d); }

  long long numerator() const { return num_; }
  long long denominator() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_integer() const { return den_ == 1; }
  bool negative() const { return num_ < 0; }

  friend Rational operator+(const Rational& x, const Rational& y) {
    __int128 n = wide(x.num_) * y.den_ + wide(y.num_) * x.den_;
    __int128 d = wide(x.den_) * y.den_;
    return from_wide(n, d);
  }
  friend Rational operator-(const Rational& x, const Rational& y) {
    __int128 n = wide(x.num_) * y.den_ - wide(y.num_) * x.den_;
    __int128 d = wide(x.den_) * y.den_;
    return from_wide(n, d);
  }
  friend Rational operator*(const Rational& x, const Rational& y) {
    return from_wide(wide(x.num_) * y.num_, wide(x.den_) * y.den_);
  }
  friend Rational operator/(const Rational& x, const Rational& y) {
    if (y.num_ == 0) throw std::domain_error("rational division by zero");
    return from_wide(wide(x.num_) * y.den_, wide(x.den_) * y.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = checked_negate(num_);
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& y) { return *this = *this + y; }
  Rational& operator-=(const Rational& y) { return *this = *this - y; }
  Rational& operator*=(const Rational& y) { return *this = *this * y; }
  Rational& operator/=(const Rational& y) { return *this = *this / y; }

  Rational inverse() const {
    if (num_ == 0) throw std::domain_error("rational division by zero");
    return from_wide(wide(den_), wide(num_));
  }

  // Integer power; k may be negative (requires a nonzero base).
  Rational pow(int k) const {
    if (k < 0) return inverse().pow(-k);
    Rational result(1);
    Rational base = *this;
    while (k > 0) {
      if (k & 1) result *= base;
      base = (k > 1) ? base * base : base;
      k >>= 1;
    }
    return result;
  }

  friend bool operator==(const Rational& x, const Rational& y) {
    return x.num_ == y.num_ && x.den_ == y.den_;
  }
  friend bool operator!=(const Rational& x, const Rational& y) { return !(x == y); }
  friend bool operator<(const Rational& x, const Rational& y) {
    return wide(x.num_) * y.den_ < wide(y.num_) * x.den_;
  }
  friend bool operator>(const Rational& x, const Rational& y) { return y < x; }
  friend bool operator<=(const Rational& x, const Rational& y) { return !(y < x); }
  friend bool operator>=(const Rational& x, const Rational& y) { return !(x < y); }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string str() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) {
      s += '/';
      s += std::to_string(den_);
    }
    return s;
  }

 private:
  long long num_;
  long long den_;

  static __int128 wide(long long v) { return static_cast<__int128>(v); }

  static __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static long long narrow(__int128 v) {
    if (v > std::numeric_limits<long long>::max() ||
        v < std::numeric_limits<long long>::min())
      throw std::overflow_error("rational overflow");
    return static_cast<long long>(v);
  }

  static long long checked_negate(long long v) {
    if (v == std::numeric_limits<long long>::min())
      throw std::overflow_error("rational overflow");
    return -v;
  }

  static Rational from_wide(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("rational division by zero");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = gcd128(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    Rational r;
    r.num_ = narrow(n);
    r.den_ = narrow(d);
    return r;
  }

  void assign(long long n, long long d) {
    Rational r = from_wide(wide(n), wide(d));
    num_ = r.num_;
    den_ = r.den_;
  }
};

}  // namespace confel
