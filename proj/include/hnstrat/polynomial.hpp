#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "hnstrat/rational.hpp"

namespace hnstrat {

/// Degree of a polynomial; the zero polynomial has degree minus infinity,
/// which compares below every finite degree.
class Degree {
 public:
  constexpr Degree() = default;
  constexpr explicit Degree(int value) : value_(value), finite_(true) {}

  static constexpr Degree minus_infinity() { return Degree(); }

  [[nodiscard]] constexpr bool is_finite() const noexcept { return finite_; }
  [[nodiscard]] constexpr int value() const noexcept { return value_; }

  friend constexpr bool operator==(const Degree&, const Degree&) = default;
  friend constexpr std::strong_ordering operator<=>(const Degree& a, const Degree& b) {
    if (a.finite_ != b.finite_) return a.finite_ ? std::strong_ordering::greater
                                                 : std::strong_ordering::less;
    if (!a.finite_) return std::strong_ordering::equal;
    return a.value_ <=> b.value_;
  }

 private:
  int value_ = 0;
  bool finite_ = false;
};

/// Univariate polynomial over the rationals, coefficients stored by ascending degree
/// with no trailing zeros.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coefficients) : c_(std::move(coefficients)) { trim(); }
  Polynomial(std::initializer_list<Rational> coefficients) : c_(coefficients) { trim(); }

  static Polynomial constant(const Rational& value) { return Polynomial({value}); }
  static Polynomial monomial(const Rational& value, std::size_t degree) {
    std::vector<Rational> c(degree + 1);
    c[degree] = value;
    return Polynomial(std::move(c));
  }

  [[nodiscard]] bool is_zero() const noexcept { return c_.empty(); }
  [[nodiscard]] Degree degree() const noexcept {
    return c_.empty() ? Degree::minus_infinity() : Degree(static_cast<int>(c_.size()) - 1);
  }
  [[nodiscard]] const std::vector<Rational>& coefficients() const noexcept { return c_; }

  /// Coefficient of x^k; zero beyond the stored range.
  [[nodiscard]] Rational coefficient(std::size_t k) const {
    return k < c_.size() ? c_[k] : Rational(0);
  }
  [[nodiscard]] Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }

  [[nodiscard]] Rational operator()(const Rational& x) const {
    Rational acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  Polynomial& operator+=(const Polynomial& other) {
    if (other.c_.size() > c_.size()) c_.resize(other.c_.size());
    for (std::size_t k = 0; k < other.c_.size(); ++k) c_[k] += other.c_[k];
    trim();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& other) {
    if (other.c_.size() > c_.size()) c_.resize(other.c_.size());
    for (std::size_t k = 0; k < other.c_.size(); ++k) c_[k] -= other.c_[k];
    trim();
    return *this;
  }
  Polynomial& operator*=(const Rational& s) {
    for (auto& v : c_) v *= s;
    trim();
    return *this;
  }
  Polynomial& operator/=(const Rational& s) {
    if (s == 0) throw Error(ErrorCode::DenominatorZero, "polynomial divided by zero");
    for (auto& v : c_) v /= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= Rational(-1); }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  friend Polynomial operator/(Polynomial a, const Rational& s) { return a /= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> out(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(out));
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  std::vector<Rational> c_;
};

/// Order of polynomials "for all x >> 0": the sign of the top coefficient of p - q.
inline std::strong_ordering compare_asymptotic(const Polynomial& p, const Polynomial& q) {
  const std::size_t n = std::max(p.coefficients().size(), q.coefficients().size());
  for (std::size_t k = n; k-- > 0;) {
    const Rational a = p.coefficient(k);
    const Rational b = q.coefficient(k);
    if (a != b) return a > b ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  return std::strong_ordering::equal;
}

inline bool asymptotically_less(const Polynomial& p, const Polynomial& q) {
  return compare_asymptotic(p, q) == std::strong_ordering::less;
}
inline bool asymptotically_greater(const Polynomial& p, const Polynomial& q) {
  return compare_asymptotic(p, q) == std::strong_ordering::greater;
}

/// True when p(x) > 0 for all sufficiently large x.
inline bool asymptotically_positive(const Polynomial& p) { return p.leading() > 0; }
inline bool asymptotically_nonnegative(const Polynomial& p) { return p.is_zero() || p.leading() > 0; }

/// Cauchy bound 1 + max |c_k / c_top|: every real root of a nonzero p lies strictly inside it.
inline Rational root_bound(const Polynomial& p) {
  if (p.is_zero()) return 0;
  Rational worst = 0;
  const Rational top = p.leading();
  const auto& c = p.coefficients();
  for (std::size_t k = 0; k + 1 < c.size(); ++k) {
    Rational ratio = abs(c[k] / top);
    if (ratio > worst) worst = ratio;
  }
  return 1 + worst;
}

/// Human-readable form, highest degree first: "x^2 - 3/2x + 1".
inline std::string to_display(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  const auto& c = p.coefficients();
  for (std::size_t k = c.size(); k-- > 0;) {
    if (c[k] == 0) continue;
    const bool negative = c[k] < 0;
    const Rational mag = negative ? Rational(-c[k]) : c[k];
    if (out.empty()) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    const std::string num = is_integer(mag) ? numerator_of(mag).str() : to_string(mag);
    if (k == 0 || mag != 1) out += num;
    if (k >= 1) out += "x";
    if (k >= 2) out += "^" + std::to_string(k);
  }
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const Polynomial& p) { return os << to_display(p); }

}  // namespace hnstrat
