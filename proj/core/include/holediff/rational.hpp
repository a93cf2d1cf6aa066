#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace holediff {

/// Exact arbitrary-precision fraction, always kept in lowest terms with a
/// positive denominator.
///
/// Every analytic quantity in the library (points, hole endpoints, values of
/// the cumulative function, diffusion coefficients) is carried as a Rational.
/// Floating point only appears when a value is rendered or handed to a
/// numerical method.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(long num, long den);
  Rational(const mpz_class& num, const mpz_class& den);
  explicit Rational(mpq_class value);

  /// r / 2^exponent.
  static Rational dyadic(const mpz_class& r, unsigned exponent);

  /// Parses "p/q", an integer "p", or a finite decimal such as "0.1875".
  /// Throws std::invalid_argument on malformed input.
  static Rational parse(std::string_view text);

  const mpz_class& num() const { return value_.get_num(); }
  const mpz_class& den() const { return value_.get_den(); }
  const mpq_class& value() const { return value_; }

  /// Canonical serialization "p/q" (also for integers, e.g. "0/1", "3/1").
  std::string str() const;
  double to_double() const { return value_.get_d(); }

  mpz_class floor() const;
  Rational frac() const { return *this - Rational(floor(), 1); }
  Rational abs() const;
  int sign() const { return sgn(value_); }
  bool is_zero() const { return sgn(value_) == 0; }
  bool is_integer() const { return value_.get_den() == 1; }

  /// True when the denominator is a power of two.
  bool is_dyadic() const;
  /// Exponent n of the denominator 2^n; only meaningful when is_dyadic().
  unsigned dyadic_exponent() const;

  std::size_t hash() const;

  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
  }

 private:
  mpq_class value_;
};

/// 2^-exponent as an exact rational.
Rational pow2_inverse(unsigned exponent);

/// Renders a double with 17 significant digits (round-trip precision).
std::string format_float(double value);

}  // namespace holediff

template <>
struct std::hash<holediff::Rational> {
  std::size_t operator()(const holediff::Rational& r) const noexcept { return r.hash(); }
};
