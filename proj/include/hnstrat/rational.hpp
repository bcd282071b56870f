#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "hnstrat/error.hpp"

namespace hnstrat {

/// Expression templates are off so that `auto` never captures an unevaluated expression.
using Integer = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;

/// Exact rational in lowest terms with positive denominator.
using Rational =
    boost::multiprecision::number<boost::multiprecision::cpp_rational_backend, boost::multiprecision::et_off>;

inline Integer numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

inline bool is_integer(const Rational& q) { return denominator_of(q) == 1; }

inline int sign(const Rational& q) { return q.sign(); }

/// Canonical text form "p/q", always with an explicit denominator.
inline std::string to_string(const Rational& q) {
  return numerator_of(q).str() + "/" + denominator_of(q).str();
}

inline Integer parse_integer(std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) body.remove_prefix(1);
  if (body.empty()) throw Error(ErrorCode::Parse, "empty integer in '" + std::string(text) + "'");
  for (char ch : body) {
    if (ch < '0' || ch > '9') {
      throw Error(ErrorCode::Parse, "malformed integer '" + std::string(text) + "'");
    }
  }
  Integer value{std::string(body)};
  return (!text.empty() && text.front() == '-') ? Integer(-value) : value;
}

/// Accepts "p", "p/q" and signed forms; rejects zero denominators.
inline Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text));
  const Integer num = parse_integer(text.substr(0, slash));
  const std::string_view den_text = text.substr(slash + 1);
  if (!den_text.empty() && (den_text.front() == '-' || den_text.front() == '+')) {
    throw Error(ErrorCode::Parse, "signed denominator in '" + std::string(text) + "'");
  }
  const Integer den = parse_integer(den_text);
  if (den == 0) throw Error(ErrorCode::Parse, "zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

inline Integer lcm_integer(const Integer& a, const Integer& b) {
  if (a == 0 || b == 0) return 0;
  return boost::multiprecision::lcm(a, b);
}

inline std::int64_t to_int64(const Integer& value) {
  if (value > std::numeric_limits<std::int64_t>::max() ||
      value < std::numeric_limits<std::int64_t>::min()) {
    throw Error(ErrorCode::InvalidInput, "integer " + value.str() + " exceeds 64 bits");
  }
  return value.convert_to<std::int64_t>();
}

inline Rational factorial(unsigned n) {
  Integer out = 1;
  for (unsigned k = 2; k <= n; ++k) out *= k;
  return Rational(out);
}

}  // namespace hnstrat
