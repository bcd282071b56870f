#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hnstrat/stability.hpp"

namespace hnstrat {

/// Weights k_1 > ... > k_s (rational weights are allowed and cleared by their LCM when
/// checked) and dim V^i_j per position.
struct OneParameterSubgroup {
  std::vector<Rational> weights;
  std::map<int, std::vector<std::int64_t>> blocks;

  friend bool operator==(const OneParameterSubgroup&, const OneParameterSubgroup&) = default;
};

/// Ranks of the quotients E^i_j of the induced filtration; crossing holds N when the
/// filtration is not by subcomplexes.
struct InducedFiltrationData {
  std::map<int, std::vector<std::int64_t>> quotientRanks;
  bool compatible = true;
  std::optional<Integer> crossing;

  friend bool operator==(const InducedFiltrationData&, const InducedFiltrationData&) = default;
};

inline Integer weight_scale(const std::vector<Rational>& weights) {
  Integer l = 1;
  for (const auto& w : weights) l = lcm_integer(l, denominator_of(w));
  return l;
}

inline std::vector<Integer> integer_weights(const std::vector<Rational>& weights) {
  const Rational scale(weight_scale(weights));
  std::vector<Integer> out;
  for (const auto& w : weights) out.push_back(numerator_of(w * scale));
  return out;
}

struct OnePSReport {
  std::vector<std::string> problems;
  Integer scale = 1;
  Integer residual = 0;

  [[nodiscard]] bool ok() const { return problems.empty(); }
};

/// Strict decrease, nontriviality, block sums against dims and the sigma-determinant
/// constraint, after clearing weight denominators.
inline OnePSReport check_1ps(const OneParameterSubgroup& lambda, const std::map<int, Integer>& sigma,
                             const std::map<int, std::int64_t>& dims) {
  OnePSReport out;
  const auto& w = lambda.weights;
  if (w.empty()) out.problems.push_back("no weights");
  for (std::size_t j = 1; j < w.size(); ++j)
    if (!(w[j - 1] > w[j])) out.problems.push_back("weights not strictly decreasing at " + std::to_string(j));
  if (std::all_of(w.begin(), w.end(), [](const Rational& x) { return x == 0; }))
    out.problems.push_back("trivial 1-PS (all weights zero)");
  out.scale = weight_scale(w);
  const auto k = integer_weights(w);
  for (const auto& [i, b] : lambda.blocks)
    if (!dims.contains(i)) out.problems.push_back("blocks given for position " + std::to_string(i) + " without a dimension");
  for (const auto& [i, d] : dims) {
    auto it = lambda.blocks.find(i);
    if (it == lambda.blocks.end()) {
      if (d != 0) out.problems.push_back("no blocks for position " + std::to_string(i));
      continue;
    }
    const auto& b = it->second;
    if (b.size() != w.size()) {
      out.problems.push_back("position " + std::to_string(i) + " has " + std::to_string(b.size()) +
                             " blocks for " + std::to_string(w.size()) + " weights");
      continue;
    }
    std::int64_t sum = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j] < 0) out.problems.push_back("negative block dimension at position " + std::to_string(i));
      sum += b[j];
      auto s = sigma.find(i);
      const Integer sig = s == sigma.end() ? Integer(1) : s->second;
      out.residual += sig * k[j] * b[j];
    }
    if (sum != d)
      out.problems.push_back("blocks at position " + std::to_string(i) + " sum to " + std::to_string(sum) +
                             ", expected " + std::to_string(d));
  }
  if (out.residual != 0) out.problems.push_back("sigma-determinant residual " + out.residual.str());
  return out;
}

struct MuReport {
  /// sigma_i P_sigma(n) / (r_sigma delta(n)) + eta_i per position.
  std::map<int, Rational> coefficients;
  Rational total;
};

namespace detail {

inline MuReport mu_sum(const OneParameterSubgroup& lambda, const InducedFiltrationData& filt,
                       const ComplexClass& ambient, const StabilityParameters& p, const Rational& n) {
  Rational P_sigma = 0;
  Rational r_sigma = 0;
  for (const auto& [i, s] : ambient.pieces()) {
    const Rational sig(p.sigma_at(i));
    P_sigma += sig * s.hilbert(n);
    r_sigma += sig * s.rank;
  }
  const Rational dn = p.delta(n);
  if (r_sigma == 0 || dn == 0) throw Error(ErrorCode::DenominatorZero, "r_sigma delta(n) vanishes");
  MuReport out;
  out.total = 0;
  for (const auto& [i, ranks] : filt.quotientRanks) {
    if (ranks.size() != lambda.weights.size())
      throw Error(ErrorCode::InvalidInput, "quotient ranks at position " + std::to_string(i) +
                                               " do not match the number of weights");
    const Rational coef = Rational(p.sigma_at(i)) * P_sigma / (r_sigma * dn) + p.eta_at(i);
    out.coefficients[i] = coef;
    for (std::size_t j = 0; j < ranks.size(); ++j) out.total += lambda.weights[j] * coef * ranks[j];
  }
  return out;
}

}  // namespace detail

/// sum_i sum_j k_j (sigma_i P_sigma(n) / (r_sigma delta(n)) + eta_i) rk E^i_j.
inline MuReport mu_subcomplex_case(const OneParameterSubgroup& lambda, const InducedFiltrationData& filt,
                                   const ComplexClass& ambient, const StabilityParameters& p, const Rational& n) {
  if (!filt.compatible) throw Error(ErrorCode::NotCompatible, "1-PS does not induce a filtration by subcomplexes");
  return detail::mu_sum(lambda, filt, ambient, p, n);
}

/// The subcomplex-case sum minus the crossing value N.
inline MuReport mu_noncompatible_case(const OneParameterSubgroup& lambda, const InducedFiltrationData& filt,
                                      const ComplexClass& ambient, const StabilityParameters& p, const Rational& n) {
  if (filt.compatible) throw Error(ErrorCode::InvalidInput, "filtration is by subcomplexes; use the subcomplex case");
  if (!filt.crossing) throw Error(ErrorCode::MissingCrossing, "crossing value N is required");
  MuReport out = detail::mu_sum(lambda, filt, ambient, p, n);
  out.total -= Rational(*filt.crossing);
  return out;
}

inline MuReport mu(const OneParameterSubgroup& lambda, const InducedFiltrationData& filt,
                   const ComplexClass& ambient, const StabilityParameters& p, const Rational& n) {
  return filt.compatible ? mu_subcomplex_case(lambda, filt, ambient, p, n)
                         : mu_noncompatible_case(lambda, filt, ambient, p, n);
}

/// sigma = 1 and eta'_i / epsilon, eta' normalized against the ranks of ambient.
inline StabilityParameters epsilon_instantiation(const EpsilonFamily& f, const ComplexClass& ambient) {
  return to_parameters(normalize_eta(f, ranks_of(ambient)));
}

struct LinearizationData {
  std::map<int, Rational> a;
  std::map<int, Rational> c;
  bool positivityOK = false;
};

inline LinearizationData linearization_data(const ComplexClass& terms, int m1, int m2, const StabilityParameters& p,
                                            const Rational& n) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "n must be at least 1");
  Rational P_sigma = 0;
  Rational r_sigma = 0;
  for (int i = m1; i <= m2; ++i) {
    const Rational sig(p.sigma_at(i));
    P_sigma += sig * terms[i].hilbert(n);
    r_sigma += sig * terms[i].rank;
  }
  const Rational dn = p.delta(n);
  if (r_sigma == 0 || dn == 0 || P_sigma == 0)
    throw Error(ErrorCode::DenominatorZero, "r_sigma delta(n) P_sigma(n) vanishes");
  LinearizationData out;
  out.positivityOK = true;
  for (int i = m1; i <= m2; ++i) {
    const SheafClass t = terms[i];
    const Rational Pi = t.hilbert(n);
    if (Pi == 0) throw Error(ErrorCode::DenominatorZero, "P^" + std::to_string(i) + "(n) vanishes");
    const Rational sig(p.sigma_at(i));
    const Rational eta = p.eta_at(i);
    out.c[i] = sig * (P_sigma / (r_sigma * dn) - 1) * (r_sigma / P_sigma - Rational(t.rank) / Pi) - t.rank * eta / Pi;
    out.a[i] = sig * (P_sigma - r_sigma * dn) / (r_sigma * dn) + eta;
    if (out.a[i] <= 0) out.positivityOK = false;
  }
  return out;
}

inline LinearizationData linearization_data(const FormalComplex& c, const StabilityParameters& p, const Rational& n) {
  return linearization_data(c.whole(), c.m1, c.m2, p, n);
}

}  // namespace hnstrat
