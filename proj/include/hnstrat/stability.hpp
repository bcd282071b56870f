#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hnstrat/complex.hpp"

namespace hnstrat {

/// (sigma, chi = delta * eta). Positions without a sigma entry carry sigma = 1.
struct StabilityParameters {
  std::map<int, Integer> sigma;
  std::map<int, Rational> eta;
  Polynomial delta = Polynomial::constant(1);
  bool sigma_zero_family = false;

  [[nodiscard]] Integer sigma_at(int i) const {
    auto it = sigma.find(i);
    return it == sigma.end() ? Integer(1) : it->second;
  }
  [[nodiscard]] Rational eta_at(int i) const {
    auto it = eta.find(i);
    if (it == eta.end()) throw Error(ErrorCode::InvalidInput, "no eta value for position " + std::to_string(i));
    return it->second;
  }
  [[nodiscard]] Rational delta_top() const { return delta.leading(); }

  friend bool operator==(const StabilityParameters&, const StabilityParameters&) = default;
};

/// Parameters (1, delta * eta / epsilon).
struct EpsilonFamily {
  std::map<int, Rational> eta;
  Polynomial delta = Polynomial::constant(1);
  Rational epsilon = 1;

  [[nodiscard]] Rational eta_at(int i) const {
    auto it = eta.find(i);
    if (it == eta.end()) throw Error(ErrorCode::InvalidInput, "no eta value for position " + std::to_string(i));
    return it->second;
  }
  [[nodiscard]] Rational delta_top() const { return delta.leading(); }

  [[nodiscard]] EpsilonFamily with_epsilon(const Rational& e) const {
    EpsilonFamily out = *this;
    out.epsilon = e;
    return out;
  }

  friend bool operator==(const EpsilonFamily&, const EpsilonFamily&) = default;
};

inline StabilityParameters to_parameters(const EpsilonFamily& f) {
  if (f.epsilon <= 0) throw Error(ErrorCode::InvalidInput, "epsilon must be positive");
  StabilityParameters p;
  for (const auto& [i, e] : f.eta) {
    p.sigma[i] = 1;
    p.eta[i] = e / f.epsilon;
  }
  p.delta = f.delta;
  return p;
}

inline std::vector<std::string> validate_parameters(const StabilityParameters& p, const SessionConfig& cfg) {
  std::vector<std::string> out;
  if (p.delta.leading() <= 0) out.push_back("delta must have positive leading coefficient");
  if (p.delta.degree() != Degree(std::max(cfg.dimX - 1, 0)))
    out.push_back("delta must have degree max(dimX - 1, 0)");
  bool any_positive = false;
  for (const auto& [i, s] : p.sigma) {
    if (s < 0) out.push_back("sigma[" + std::to_string(i) + "] is negative");
    if (s > 0) any_positive = true;
  }
  if (p.sigma.empty()) any_positive = true;
  for (const auto& [i, e] : p.eta)
    if (!p.sigma.contains(i)) any_positive = true;
  if (!any_positive && !p.sigma_zero_family) out.push_back("all sigma vanish but the family is not flagged sigma = 0");
  return out;
}

inline std::vector<std::string> validate_family(const EpsilonFamily& f, const SessionConfig& cfg) {
  std::vector<std::string> out;
  if (f.epsilon <= 0) out.push_back("epsilon must be positive");
  if (f.delta.leading() <= 0) out.push_back("delta must have positive leading coefficient");
  if (f.delta.degree() != Degree(std::max(cfg.dimX - 1, 0)))
    out.push_back("delta must have degree max(dimX - 1, 0)");
  const Rational* prev = nullptr;
  int prev_i = 0;
  for (const auto& [i, e] : f.eta) {
    if (prev && !(*prev < e))
      out.push_back("eta must increase strictly: eta[" + std::to_string(prev_i) + "] >= eta[" +
                    std::to_string(i) + "]");
    prev = &e;
    prev_i = i;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reduced Hilbert polynomials and normalization

inline Polynomial reduced_hilbert(const ComplexClass& c, const StabilityParameters& p) {
  Polynomial num;
  Rational den = 0;
  for (const auto& [i, s] : c.pieces()) {
    const Rational sig(p.sigma_at(i));
    num += s.hilbert * sig;
    num -= p.delta * (p.eta_at(i) * s.rank);
    den += sig * s.rank;
  }
  if (den == 0) throw Error(ErrorCode::DenominatorZero, "sigma-weighted rank vanishes");
  return num / den;
}

inline Polynomial reduced_hilbert(const FormalComplex& c, const StabilityParameters& p) {
  return reduced_hilbert(c.whole(), p);
}

inline Polynomial reduced_hilbert(const ComplexClass& c, const EpsilonFamily& f) {
  return reduced_hilbert(c, to_parameters(f));
}

inline Rational normalization_constant(const StabilityParameters& p, const std::map<int, std::int64_t>& ranks) {
  Rational num = 0;
  Rational den = 0;
  for (const auto& [i, r] : ranks) {
    num += p.eta_at(i) * r;
    den += Rational(p.sigma_at(i)) * r;
  }
  if (den == 0) throw Error(ErrorCode::DenominatorZero, "sigma-weighted rank vanishes");
  return num / den;
}

inline std::map<int, std::int64_t> ranks_of(const ComplexClass& c) {
  std::map<int, std::int64_t> out;
  for (const auto& [i, s] : c.pieces()) out[i] = s.rank;
  return out;
}

/// eta'_i = eta_i - C sigma_i with C = sum eta r / sum sigma r, so that sum eta' r = 0.
inline StabilityParameters normalize_eta(const StabilityParameters& p, const std::map<int, std::int64_t>& ranks) {
  const Rational C = normalization_constant(p, ranks);
  StabilityParameters out = p;
  for (auto& [i, e] : out.eta) e -= C * Rational(p.sigma_at(i));
  return out;
}

inline StabilityParameters normalize_eta(const StabilityParameters& p, const FormalComplex& c) {
  return normalize_eta(p, ranks_of(c.whole()));
}

inline EpsilonFamily normalize_eta(const EpsilonFamily& f, const std::map<int, std::int64_t>& ranks) {
  Rational num = 0;
  Rational den = 0;
  for (const auto& [i, r] : ranks) {
    num += f.eta_at(i) * r;
    den += r;
  }
  if (den == 0) throw Error(ErrorCode::DenominatorZero, "total rank vanishes");
  EpsilonFamily out = f;
  for (auto& [i, e] : out.eta) e -= num / den;
  return out;
}

/// (sigma, K delta, eta / K); chi is unchanged.
inline StabilityParameters rescale_parameters(const StabilityParameters& p, const Integer& K) {
  if (K < 1) throw Error(ErrorCode::InvalidInput, "rescaling factor must be at least 1");
  StabilityParameters out = p;
  out.delta = p.delta * Rational(K);
  for (auto& [i, e] : out.eta) e /= Rational(K);
  return out;
}

// ---------------------------------------------------------------------------
// Verdicts

enum class VerdictKind { Semistable, Stable, Destabilized };

inline std::string to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Semistable: return "semistable";
    case VerdictKind::Stable: return "stable";
    case VerdictKind::Destabilized: return "destabilized";
  }
  return "unknown";
}

struct Verdict {
  VerdictKind kind = VerdictKind::Semistable;
  std::optional<ComplexClass> witness;
  std::size_t witness_index = 0;

  [[nodiscard]] bool semistable() const { return kind != VerdictKind::Destabilized; }
};

/// Throws InvalidTestObject unless e is a nonzero proper subobject of ambient at the
/// level of ranks.
inline void check_test_object(const ComplexClass& e, const ComplexClass& ambient) {
  if (e.is_zero()) throw Error(ErrorCode::InvalidTestObject, "test object is zero");
  if (e == ambient) throw Error(ErrorCode::InvalidTestObject, "test object is not proper");
  for (const auto& [i, s] : e.pieces()) {
    const SheafClass amb = ambient[i];
    if (s.rank < 0 || s.rank > amb.rank)
      throw Error(ErrorCode::InvalidTestObject,
                  "test object rank at position " + std::to_string(i) + " exceeds the ambient rank");
    if (amb.is_zero())
      throw Error(ErrorCode::InvalidTestObject, "test object has a piece where the ambient is zero");
  }
}

inline Verdict is_semistable(const ComplexClass& ambient, const StabilityParameters& p,
                             const std::vector<ComplexClass>& tests) {
  const Polynomial whole = reduced_hilbert(ambient, p);
  bool all_strict = true;
  for (std::size_t k = 0; k < tests.size(); ++k) {
    check_test_object(tests[k], ambient);
    const auto cmp = compare_asymptotic(reduced_hilbert(tests[k], p), whole);
    if (cmp == std::strong_ordering::greater) return {VerdictKind::Destabilized, tests[k], k};
    if (cmp == std::strong_ordering::equal) all_strict = false;
  }
  if (!tests.empty() && all_strict) return {VerdictKind::Stable, std::nullopt, 0};
  return {VerdictKind::Semistable, std::nullopt, 0};
}

inline Verdict is_semistable(const FormalComplex& c, const StabilityParameters& p,
                             const std::vector<ComplexClass>& tests) {
  return is_semistable(c.whole(), p, tests);
}

/// sum eta_i rk E^i / sum rk E^i.
inline Rational eta_average(const ComplexClass& c, const std::map<int, Rational>& eta) {
  Rational num = 0;
  std::int64_t den = 0;
  for (const auto& [i, s] : c.pieces()) {
    auto it = eta.find(i);
    if (it == eta.end()) throw Error(ErrorCode::InvalidInput, "no eta value for position " + std::to_string(i));
    num += it->second * s.rank;
    den += s.rank;
  }
  if (den == 0) throw Error(ErrorCode::DenominatorZero, "total rank vanishes");
  return num / den;
}

/// The sigma = 0 condition: E destabilizes when its eta-average is strictly smaller.
inline Verdict sigma0_semistable(const ComplexClass& ambient, const std::map<int, Rational>& eta,
                                 const std::vector<ComplexClass>& tests) {
  const Rational whole = eta_average(ambient, eta);
  bool all_strict = true;
  for (std::size_t k = 0; k < tests.size(); ++k) {
    check_test_object(tests[k], ambient);
    const Rational avg = eta_average(tests[k], eta);
    if (avg < whole) return {VerdictKind::Destabilized, tests[k], k};
    if (avg == whole) all_strict = false;
  }
  if (!tests.empty() && all_strict) return {VerdictKind::Stable, std::nullopt, 0};
  return {VerdictKind::Semistable, std::nullopt, 0};
}

inline Verdict sigma0_semistable(const FormalComplex& c, const EpsilonFamily& f,
                                 const std::vector<ComplexClass>& tests) {
  return sigma0_semistable(c.whole(), f.eta, tests);
}

// ---------------------------------------------------------------------------
// Bounds

/// A positive rational or "unbounded".
struct Bound {
  std::optional<Rational> value;

  static Bound unbounded() { return {}; }
  static Bound finite(const Rational& v) { return {v}; }
  [[nodiscard]] bool is_unbounded() const { return !value.has_value(); }
  /// True when x lies strictly below the bound.
  [[nodiscard]] bool admits(const Rational& x) const { return !value || x < *value; }

  friend bool operator==(const Bound&, const Bound&) = default;
};

inline std::string to_string(const Bound& b) { return b.value ? to_string(*b.value) : "unbounded"; }

inline Bound min_bound(const Bound& a, const Bound& b) {
  if (a.is_unbounded()) return b;
  if (b.is_unbounded()) return a;
  return Bound::finite(*a.value < *b.value ? *a.value : *b.value);
}

/// For a witness E with strictly smaller eta-average than F: the epsilon below which E
/// destabilizes F for (1, delta eta / epsilon).
inline Bound destabilizing_threshold(const ComplexClass& e, const ComplexClass& f, const EpsilonFamily& fam,
                                     const SessionConfig& cfg) {
  const Rational gap = eta_average(f, fam.eta) - eta_average(e, fam.eta);
  if (gap <= 0) throw Error(ErrorCode::InvalidInput, "witness does not violate the sigma = 0 inequality");
  const std::size_t k = static_cast<std::size_t>(std::max(cfg.dimX - 1, 0));
  const Polynomial diff = e.total_hilbert() / Rational(e.total_rank()) - f.total_hilbert() / Rational(f.total_rank());
  const Rational a = diff.coefficient(k);
  if (cfg.dimX == 0 || a >= 0) return Bound::unbounded();
  return Bound::finite(gap * fam.delta_top() / (-a));
}

}  // namespace hnstrat
