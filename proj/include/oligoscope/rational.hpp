#ifndef OLIGOSCOPE_RATIONAL_HPP_
#define OLIGOSCOPE_RATIONAL_HPP_

#include <cstdint>
#include <numeric>
#include <string>

#include "oligoscope/error.hpp"

namespace oligoscope {

// Exact rational arithmetic on int64 numerator/denominator, always reduced,
// denominator > 0.  Intermediate products go through __int128 and overflow is
// an error, not silent wraparound.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  Rational(long long num, long long den) : num_(num), den_(den) { normalize(); }
  // Implicit from integers: Rational(3) == 3/1.
  constexpr Rational(long long n) : num_(n), den_(1) {}  // NOLINT

  long long num() const { return num_; }
  long long den() const { return den_; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                   i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                   i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw DomainError("division_by_zero", "rational division by zero");
    return from128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rational operator-() const { return Rational(-num_, den_); }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  // "p/q" reduced; denominator 1 prints as a bare integer.
  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Accepts "p", "p/q", optional leading '-', no whitespace.
  static Rational parse(const std::string& s) {
    auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return Rational(std::stoll(s), 1);
      return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception&) {
      throw DomainError("bad_rational", "malformed rational: '" + s + "'");
    }
  }

 private:
  using i128 = __int128;

  static Rational from128(i128 num, i128 den) {
    if (den == 0) throw DomainError("division_by_zero", "zero denominator");
    if (den < 0) { num = -num; den = -den; }
    i128 g = gcd128(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
    constexpr i128 kMax = INT64_MAX;
    if (num > kMax || num < -kMax || den > kMax)
      throw DomainError("overflow", "rational overflow");
    Rational r;
    r.num_ = static_cast<long long>(num);
    r.den_ = static_cast<long long>(den);
    return r;
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) { i128 t = a % b; a = b; b = t; }
    return a == 0 ? 1 : a;
  }

  void normalize() {
    *this = from128(num_, den_);
  }

  long long num_, den_;
};

}  // namespace oligoscope

#endif  // OLIGOSCOPE_RATIONAL_HPP_
