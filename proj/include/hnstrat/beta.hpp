#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hnstrat/hn.hpp"
#include "hnstrat/weights.hpp"

namespace hnstrat {

using BlockKey = std::pair<int, int>;

inline BlockKey block_key(const PieceLabel& l) { return {l.index, l.sub.value_or(1)}; }

inline std::string to_string(const BlockKey& k) {
  return std::to_string(k.first) + "," + std::to_string(k.second);
}

/// The weights a_{i,j} (cohomology blocks) and b_{i,j} (cone blocks) at a fixed n.
struct ABData {
  std::map<BlockKey, Rational> a;
  std::map<BlockKey, Rational> b;
  /// Weights in the order of the type's entries.
  std::vector<Rational> ordered;
  /// Multiplicity H_{i,j}(n) or I_{i,j}(n) of each entry.
  std::vector<Rational> values;
  std::map<int, Rational> etaNormalized;
  Rational P1;
  Rational r1;
  Rational deltaN;
};

namespace detail {

struct AmbientAtN {
  ComplexClass total;
  Rational P1;
  Rational r1;
  Rational dn;
  EpsilonFamily normalized;
};

inline AmbientAtN ambient_at(const HNType& tau, const EpsilonFamily& f, const Rational& n) {
  if (tau.entries.empty()) throw Error(ErrorCode::EmptyType, "HN type has no entries");
  AmbientAtN out;
  out.total = tau.total();
  out.P1 = out.total.total_hilbert()(n);
  out.r1 = out.total.total_rank();
  out.dn = f.delta(n);
  if (out.dn <= 0) throw Error(ErrorCode::DenominatorZero, "delta(n) must be positive");
  if (out.r1 == 0) throw Error(ErrorCode::DenominatorZero, "total rank vanishes");
  out.normalized = normalize_eta(f, ranks_of(out.total));
  return out;
}

inline SheafClass entry_sheaf(const LabeledPiece& e) { return e.piece[e.label.index]; }

inline Rational entry_value(const LabeledPiece& e, const Rational& n) {
  const Rational v = entry_sheaf(e).hilbert(n);
  if (v <= 0)
    throw Error(ErrorCode::DenominatorZero, to_string(e.label) + "(n) = " + to_string(v) + " is not positive");
  return v;
}

/// eta'_i / epsilon for cohomology blocks, (eta'_i + eta'_{i+1}) / (2 epsilon) for cone blocks.
inline Rational eta_term(const LabeledPiece& e, const EpsilonFamily& normalized) {
  const int i = e.label.index;
  if (e.label.kind == PieceKind::Cohomology) return normalized.eta_at(i) / normalized.epsilon;
  return (normalized.eta_at(i) + normalized.eta_at(i + 1)) / (2 * normalized.epsilon);
}

}  // namespace detail

inline ABData compute_ab(const HNType& tau, const EpsilonFamily& f, const Rational& n) {
  const auto amb = detail::ambient_at(tau, f, n);
  ABData out;
  out.P1 = amb.P1;
  out.r1 = amb.r1;
  out.deltaN = amb.dn;
  out.etaNormalized = amb.normalized.eta;
  const Rational base = amb.P1 / (amb.r1 * amb.dn);
  for (const auto& e : tau.entries) {
    const Rational value = detail::entry_value(e, n);
    const Rational rk = detail::entry_sheaf(e).rank;
    const Rational w = 1 / amb.dn - (base + detail::eta_term(e, amb.normalized)) * rk / value;
    (e.label.kind == PieceKind::Cohomology ? out.a : out.b)[block_key(e.label)] = w;
    out.ordered.push_back(w);
    out.values.push_back(value);
  }
  return out;
}

/// Index k of the first pair of the chain with weight[k] <= weight[k+1].
inline std::optional<std::size_t> check_weight_ordering(const ABData& ab) {
  for (std::size_t k = 0; k + 1 < ab.ordered.size(); ++k)
    if (!(ab.ordered[k] > ab.ordered[k + 1])) return k;
  return std::nullopt;
}

/// Least n0 such that compute_ab succeeds and the ordering holds for every n in [n0, nMax].
/// This is a sampled guarantee up to nMax only.
inline std::optional<int> find_min_n(const HNType& tau, const EpsilonFamily& f, int nMax) {
  std::optional<int> best;
  for (int n = nMax; n >= 1; --n) {
    bool ok = false;
    try {
      ok = !check_weight_ordering(compute_ab(tau, f, n)).has_value();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DenominatorZero) throw;
    }
    if (!ok) break;
    best = n;
  }
  return best;
}

struct BetaBlock {
  PieceLabel label;
  int slot = 0;
  Rational weight;
  Integer multiplicity;
};

struct BetaIndex {
  std::vector<BetaBlock> blocks;
  Rational normSquared;
  int n = 0;
  ABData ab;
};

struct BetaBuild {
  BetaIndex beta;
  /// lambda_beta with the rational weights of beta.
  OneParameterSubgroup lambda;
  /// lambda_beta after clearing denominators.
  OneParameterSubgroup integral;
  Integer scale = 1;
  OnePSReport check;
  bool trivial = false;
};

namespace detail {

inline InducedFiltrationData graded_filtration(const HNType& tau) {
  InducedFiltrationData out;
  const ComplexClass total = tau.total();
  for (const auto& [i, s] : total.pieces()) out.quotientRanks[i].assign(tau.entries.size(), 0);
  for (std::size_t e = 0; e < tau.entries.size(); ++e)
    for (const auto& [i, s] : tau.entries[e].piece.pieces()) out.quotientRanks[i][e] = s.rank;
  return out;
}

inline std::int64_t integral_value(const Rational& v, const PieceLabel& l) {
  if (!is_integer(v))
    throw Error(ErrorCode::InvalidInput, to_string(l) + "(n) = " + to_string(v) + " is not an integer");
  return to_int64(numerator_of(v));
}

}  // namespace detail

inline Rational sum_zero_residual(const ABData& ab, const HNType& tau) {
  Rational s = 0;
  for (std::size_t e = 0; e < tau.entries.size(); ++e) {
    const Rational mult = tau.entries[e].label.kind == PieceKind::Cohomology ? ab.values[e] : 2 * ab.values[e];
    s += ab.ordered[e] * mult;
  }
  return s;
}

inline BetaBuild build_beta(const HNType& tau, const EpsilonFamily& f, int n) {
  BetaBuild out;
  out.beta.n = n;
  out.beta.ab = compute_ab(tau, f, n);
  const ABData& ab = out.beta.ab;
  if (const auto bad = check_weight_ordering(ab))
    throw Error(ErrorCode::OrderingViolated, "weights fail to decrease after " + to_string(tau.entries[*bad].label));
  const Rational residual = sum_zero_residual(ab, tau);
  if (residual != 0) throw Error(ErrorCode::SumZeroViolated, "sum-zero residual " + to_string(residual));

  const ComplexClass total = tau.total();
  const int lo = total.pieces().begin()->first;
  const int hi = total.pieces().rbegin()->first;
  for (int slot = lo; slot <= hi; ++slot) {
    for (std::size_t e = 0; e < tau.entries.size(); ++e) {
      const PieceLabel& l = tau.entries[e].label;
      const bool in_slot = l.kind == PieceKind::Cohomology ? l.index == slot
                                                           : (l.index == slot - 1 || l.index == slot);
      if (!in_slot) continue;
      out.beta.blocks.push_back({l, slot, ab.ordered[e], numerator_of(ab.values[e])});
    }
  }
  out.beta.normSquared = 0;
  for (const auto& blk : out.beta.blocks) out.beta.normSquared += blk.weight * blk.weight * Rational(blk.multiplicity);

  out.lambda.weights = ab.ordered;
  for (int slot = lo; slot <= hi; ++slot) out.lambda.blocks[slot].assign(tau.entries.size(), 0);
  for (std::size_t e = 0; e < tau.entries.size(); ++e) {
    const auto mult = detail::integral_value(ab.values[e], tau.entries[e].label);
    for (const auto& [i, s] : tau.entries[e].piece.pieces()) out.lambda.blocks[i][e] = mult;
  }
  out.scale = weight_scale(out.lambda.weights);
  out.integral.blocks = out.lambda.blocks;
  for (const auto& k : integer_weights(out.lambda.weights)) out.integral.weights.push_back(Rational(k));

  out.trivial = tau.entries.size() == 1;
  if (!out.trivial) {
    std::map<int, std::int64_t> dims;
    for (int slot = lo; slot <= hi; ++slot)
      dims[slot] = detail::integral_value(total[slot].hilbert(n), {PieceKind::Cohomology, slot, {}});
    out.check = check_1ps(out.integral, {}, dims);
  }
  return out;
}

struct WeightIdentity {
  bool verified = false;
  /// -mu(gr z, lambda_beta) from the general weight formula.
  Rational minusMu;
  Rational normSquared;
  /// mu from the closed-form display in terms of a, b.
  Rational displayMu;
};

inline WeightIdentity verify_weight_identity(const BetaIndex& beta, const HNType& tau, const EpsilonFamily& f) {
  const Rational n = beta.n;
  const auto amb = detail::ambient_at(tau, f, n);
  OneParameterSubgroup lambda;
  for (const auto& e : tau.entries) {
    const auto& m = e.label.kind == PieceKind::Cohomology ? beta.ab.a : beta.ab.b;
    auto it = m.find(block_key(e.label));
    if (it == m.end()) throw Error(ErrorCode::InvalidInput, "no weight for " + to_string(e.label));
    lambda.weights.push_back(it->second);
  }
  const StabilityParameters p = to_parameters(amb.normalized);
  const MuReport mu = mu_subcomplex_case(lambda, detail::graded_filtration(tau), amb.total, p, n);

  Rational display = 0;
  const Rational base = amb.P1 / (amb.r1 * amb.dn);
  for (std::size_t e = 0; e < tau.entries.size(); ++e) {
    const auto& entry = tau.entries[e];
    const Rational rk = detail::entry_sheaf(entry).rank;
    if (entry.label.kind == PieceKind::Cohomology)
      display += lambda.weights[e] * rk * (base + detail::eta_term(entry, amb.normalized));
    else
      display += lambda.weights[e] * rk * 2 * (base + detail::eta_term(entry, amb.normalized));
  }
  WeightIdentity out;
  out.minusMu = -mu.total;
  out.normSquared = beta.normSquared;
  out.displayMu = display;
  out.verified = out.minusMu == out.normSquared && display == mu.total;
  return out;
}

/// Exponents of u_{i,j} (cohomology blocks) and w_{i,j} (cone blocks) in chi_F.
inline std::map<PieceLabel, Rational> chi_F_exponents(const HNType& tau, const EpsilonFamily& f, const Rational& n) {
  const auto amb = detail::ambient_at(tau, f, n);
  const Rational base = amb.P1 / (amb.r1 * amb.dn);
  std::map<PieceLabel, Rational> out;
  for (const auto& e : tau.entries) {
    const Rational rk = detail::entry_sheaf(e).rank;
    const Rational t = detail::eta_term(e, amb.normalized);
    out[e.label] = e.label.kind == PieceKind::Cohomology ? -rk * (base + t) : -rk * 2 * (base + t);
  }
  return out;
}

struct GradedPiece {
  PieceLabel label;
  SmallEpsilonClass classification;
};

struct StratumCertificate {
  HNType tau;
  std::vector<Polynomial> chain;
  Bound epsilon0;
  int n = 0;
  std::optional<ABData> ab;
  std::optional<std::size_t> orderingViolation;
  std::optional<BetaBuild> beta;
  bool sumZero = false;
  std::optional<WeightIdentity> identity;
  std::map<PieceLabel, Rational> chiF;
  std::vector<GradedPiece> graded;
  bool coneAssumption = false;
  std::optional<int> minN;
  /// "ok" or "InsufficientN".
  std::string status = "ok";
  std::string detail;

  [[nodiscard]] bool flagged() const {
    if (status != "ok") return true;
    if (!identity || !identity->verified || !sumZero) return true;
    if (beta && !beta->trivial && !beta->check.ok()) return true;
    for (const auto& g : graded)
      if (g.classification.shape == SmallEpsilonShape::NotSmallEpsilonSemistable) return true;
    return false;
  }
};

inline StratumCertificate certify_membership(const FormalComplex& c, const EpsilonFamily& f, int n,
                                             bool cone_assumption = false) {
  StratumCertificate out;
  const RefinedHN hn = refined_hn_filtration(c, f);
  out.tau = hn.type;
  out.chain = hn.chain;
  out.epsilon0 = hn.threshold.bound;
  out.n = n;
  out.coneAssumption = cone_assumption;
  for (const auto& e : out.tau.entries)
    out.graded.push_back({e.label, classify_epsilon_ss(piece_complex(e, c.config), f)});
  try {
    out.ab = compute_ab(out.tau, f, n);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DenominatorZero) throw;
    out.status = "InsufficientN";
    out.detail = e.what();
  }
  if (out.ab) {
    out.orderingViolation = check_weight_ordering(*out.ab);
    if (out.orderingViolation) {
      out.status = "InsufficientN";
      out.detail = "weights fail to decrease after " + to_string(out.tau.entries[*out.orderingViolation].label);
    }
  }
  if (out.status != "ok") {
    out.minN = find_min_n(out.tau, f, std::max(2 * n, 100));
    return out;
  }
  out.beta = build_beta(out.tau, f, n);
  out.sumZero = sum_zero_residual(out.beta->beta.ab, out.tau) == 0;
  out.identity = verify_weight_identity(out.beta->beta, out.tau, f);
  out.chiF = chi_F_exponents(out.tau, f, n);
  return out;
}

}  // namespace hnstrat
