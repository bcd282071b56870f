#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "hnstrat/stability.hpp"

namespace hnstrat {

// ---------------------------------------------------------------------------
// sigma = 0 classification

enum class Sigma0Shape { ShiftOfSheaf, ConeOfIdentity, Neither };
enum class Sigma0Reason { None, MultiplePositions, NonIsoBoundary, KernelPresent, ZeroBoundary };

inline std::string to_string(Sigma0Shape s) {
  switch (s) {
    case Sigma0Shape::ShiftOfSheaf: return "ShiftOfSheaf";
    case Sigma0Shape::ConeOfIdentity: return "ConeOfIdentity";
    case Sigma0Shape::Neither: return "Neither";
  }
  return "unknown";
}

inline std::string to_string(Sigma0Reason r) {
  switch (r) {
    case Sigma0Reason::None: return "None";
    case Sigma0Reason::MultiplePositions: return "MultiplePositions";
    case Sigma0Reason::NonIsoBoundary: return "NonIsoBoundary";
    case Sigma0Reason::KernelPresent: return "KernelPresent";
    case Sigma0Reason::ZeroBoundary: return "ZeroBoundary";
  }
  return "unknown";
}

struct Sigma0Class {
  Sigma0Shape shape = Sigma0Shape::Neither;
  int position = 0;
  Sigma0Reason reason = Sigma0Reason::None;

  [[nodiscard]] bool semistable() const { return shape != Sigma0Shape::Neither; }
  friend bool operator==(const Sigma0Class&, const Sigma0Class&) = default;
};

inline Sigma0Class sigma0_classify(const FormalComplex& c) {
  std::vector<int> nonzero;
  for (int i = c.m1; i <= c.m2; ++i)
    if (!c.term(i).is_zero()) nonzero.push_back(i);
  if (nonzero.size() == 1) return {Sigma0Shape::ShiftOfSheaf, nonzero.front(), Sigma0Reason::None};
  if (nonzero.size() != 2 || nonzero[1] != nonzero[0] + 1)
    return {Sigma0Shape::Neither, 0, Sigma0Reason::MultiplePositions};
  const int k = nonzero[0];
  const SheafClass im = c.image(k);
  if (im.is_zero()) return {Sigma0Shape::Neither, 0, Sigma0Reason::ZeroBoundary};
  if (!c.kernel(k).is_zero()) return {Sigma0Shape::Neither, 0, Sigma0Reason::KernelPresent};
  if (im != c.term(k + 1)) return {Sigma0Shape::Neither, 0, Sigma0Reason::NonIsoBoundary};
  return {Sigma0Shape::ConeOfIdentity, k, Sigma0Reason::None};
}

/// ker d^k at k when nonzero, otherwise (F^k -> im d^k); k is the first nonzero position.
inline ComplexClass sigma0_max_destabilizer(const FormalComplex& c) {
  const int k = c.m1;
  const SheafClass ker = c.kernel(k);
  if (!ker.is_zero()) return ComplexClass::at(k, ker);
  ComplexClass out = ComplexClass::at(k, c.term(k));
  out.set(k + 1, c.image(k));
  return out;
}

/// Kernels and images picked out in order, skipping zero quotients.
inline HNFiltration sigma0_hn_filtration(const FormalComplex& c) {
  HNFiltration out;
  ComplexClass cur;
  for (int i = c.m1; i <= c.m2; ++i) {
    const SheafClass h = c.cohomology(i);
    if (!h.is_zero()) {
      cur.set(i, c.kernel(i));
      out.steps.push_back(cur);
      out.quotients.push_back({{PieceKind::Cohomology, i, std::nullopt}, ComplexClass::at(i, h)});
    }
    const SheafClass im = c.image(i);
    if (!im.is_zero()) {
      cur.set(i, c.term(i));
      cur.set(i + 1, im);
      out.steps.push_back(cur);
      ComplexClass q = ComplexClass::at(i, im);
      q.set(i + 1, im);
      out.quotients.push_back({{PieceKind::Cone, i, std::nullopt}, q});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Refined pieces and the small-epsilon threshold

inline std::vector<SheafClass> require_hn(const std::optional<std::vector<SheafClass>>& hn, const std::string& what) {
  if (!hn) throw Error(ErrorCode::MissingHNData, "no HN data for " + what);
  return *hn;
}

/// H(i,j) at i and I(i,j) at (i, i+1), in chain order.
inline std::vector<LabeledPiece> refined_pieces(const FormalComplex& c) {
  std::vector<LabeledPiece> out;
  for (int i = c.m1; i <= c.m2; ++i) {
    const auto h = require_hn(c.cohomology_hn(i), "H^" + std::to_string(i));
    for (std::size_t j = 0; j < h.size(); ++j)
      out.push_back({{PieceKind::Cohomology, i, static_cast<int>(j + 1)}, ComplexClass::at(i, h[j])});
    if (i == c.m2) break;
    const auto im = require_hn(c.image_hn(i), "im d^" + std::to_string(i));
    for (std::size_t j = 0; j < im.size(); ++j) {
      ComplexClass q = ComplexClass::at(i, im[j]);
      q.set(i + 1, im[j]);
      out.push_back({{PieceKind::Cone, i, static_cast<int>(j + 1)}, q});
    }
  }
  return out;
}

struct IndexThreshold {
  std::optional<Rational> M;
  bool active = false;
};

/// One adjacent pair of the refined chain whose order flips at a finite epsilon.
struct ChainConstraint {
  PieceLabel upper;
  PieceLabel lower;
  Rational threshold;
};

struct Epsilon0Result {
  Bound bound;
  std::map<int, IndexThreshold> perIndex;
  std::vector<ChainConstraint> constraints;
};

/// The bound consists of one constraint per adjacent pair (A, B) of the refined chain
/// with eta-average(A) < eta-average(B) and slope(B) > slope(A):
/// epsilon < delta_top (avg B - avg A) / (slope B - slope A). When every H^i and im d^i is
/// nonzero these are exactly the pairs entering M_i, and the minimum equals
/// min delta_top (eta_{i+1} - eta_i) / (2 M_i).
inline Epsilon0Result epsilon_threshold(const FormalComplex& c, const EpsilonFamily& f) {
  const SessionConfig& cfg = c.config;
  const auto pieces = refined_pieces(c);
  Epsilon0Result out;
  if (cfg.dimX == 0) {
    for (int i = c.m1; i < c.m2; ++i) out.perIndex[i] = {Rational(0), false};
    return out;
  }
  const auto piece_slope = [&](const LabeledPiece& p) {
    const ComplexClass& q = p.piece;
    return slope(SheafClass{q.total_rank(), q.total_hilbert()}, cfg);
  };
  for (int i = c.m1; i < c.m2; ++i) {
    const auto h = require_hn(c.cohomology_hn(i), "H^" + std::to_string(i));
    const auto im = require_hn(c.image_hn(i), "im d^" + std::to_string(i));
    const auto h1 = require_hn(c.cohomology_hn(i + 1), "H^" + std::to_string(i + 1));
    IndexThreshold t;
    if (!im.empty()) {
      if (!h.empty()) t.M = slope(im.front(), cfg) - slope(h.back(), cfg);
      if (!h1.empty()) {
        const Rational second = slope(h1.front(), cfg) - slope(im.back(), cfg);
        if (!t.M || second > *t.M) t.M = second;
      }
    }
    t.active = t.M && *t.M > 0;
    out.perIndex[i] = t;
  }
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
    const Rational avg_a = eta_average(pieces[k].piece, f.eta);
    const Rational avg_b = eta_average(pieces[k + 1].piece, f.eta);
    if (!(avg_a < avg_b)) continue;
    const Rational rise = piece_slope(pieces[k + 1]) - piece_slope(pieces[k]);
    if (rise <= 0) continue;
    const Rational th = f.delta_top() * (avg_b - avg_a) / rise;
    out.constraints.push_back({pieces[k].label, pieces[k + 1].label, th});
    out.bound = min_bound(out.bound, Bound::finite(th));
  }
  return out;
}

/// Reduced Hilbert polynomials of the refined pieces for the given family, without any
/// threshold check.
inline std::vector<Polynomial> refined_chain(const FormalComplex& c, const EpsilonFamily& f) {
  const StabilityParameters p = to_parameters(f);
  std::vector<Polynomial> out;
  for (const auto& piece : refined_pieces(c)) out.push_back(reduced_hilbert(piece.piece, p));
  return out;
}

/// Index k of the first pair with chain[k] <= chain[k+1], if any.
inline std::optional<std::size_t> first_chain_violation(const std::vector<Polynomial>& chain) {
  for (std::size_t k = 0; k + 1 < chain.size(); ++k)
    if (!asymptotically_greater(chain[k], chain[k + 1])) return k;
  return std::nullopt;
}

struct RefinedHN {
  HNFiltration filtration;
  HNType type;
  std::vector<Polynomial> chain;
  Epsilon0Result threshold;
};

inline RefinedHN refined_hn_filtration(const FormalComplex& c, const EpsilonFamily& f) {
  if (f.epsilon <= 0) throw Error(ErrorCode::InvalidInput, "epsilon must be positive");
  RefinedHN out;
  out.threshold = epsilon_threshold(c, f);
  if (!out.threshold.bound.admits(f.epsilon))
    throw Error(ErrorCode::EpsilonTooLarge, "epsilon >= bound " + to_string(out.threshold.bound));
  const auto pieces = refined_pieces(c);
  const StabilityParameters p = to_parameters(f);
  ComplexClass cur;
  for (const auto& piece : pieces) {
    cur += piece.piece;
    out.filtration.steps.push_back(cur);
    out.filtration.quotients.push_back(piece);
    out.chain.push_back(reduced_hilbert(piece.piece, p));
  }
  if (const auto bad = first_chain_violation(out.chain))
    throw Error(ErrorCode::ChainNotDecreasing,
                "chain fails to decrease after " + to_string(pieces[*bad].label));
  if (cur != c.whole()) throw Error(ErrorCode::ChainNotDecreasing, "refined steps do not exhaust the complex");
  out.type.entries = pieces;
  return out;
}

// ---------------------------------------------------------------------------
// Small-epsilon classification

enum class SmallEpsilonShape { ShiftOfSemistableSheaf, ConeOnSemistableSheaf, NotSmallEpsilonSemistable };
enum class SmallEpsilonReason { None, MultiplePieces, UnstableSheaf };

inline std::string to_string(SmallEpsilonShape s) {
  switch (s) {
    case SmallEpsilonShape::ShiftOfSemistableSheaf: return "ShiftOfSemistableSheaf";
    case SmallEpsilonShape::ConeOnSemistableSheaf: return "ConeOnSemistableSheaf";
    case SmallEpsilonShape::NotSmallEpsilonSemistable: return "NotSmallEpsilonSemistable";
  }
  return "unknown";
}

inline std::string to_string(SmallEpsilonReason r) {
  switch (r) {
    case SmallEpsilonReason::None: return "None";
    case SmallEpsilonReason::MultiplePieces: return "MultiplePieces";
    case SmallEpsilonReason::UnstableSheaf: return "UnstableSheaf";
  }
  return "unknown";
}

struct SmallEpsilonClass {
  SmallEpsilonShape shape = SmallEpsilonShape::NotSmallEpsilonSemistable;
  SmallEpsilonReason reason = SmallEpsilonReason::None;
  friend bool operator==(const SmallEpsilonClass&, const SmallEpsilonClass&) = default;
};

inline SmallEpsilonClass classify_epsilon_ss(const FormalComplex& c, const EpsilonFamily&) {
  const Sigma0Class s = sigma0_classify(c);
  switch (s.shape) {
    case Sigma0Shape::ShiftOfSheaf: {
      const auto hn = require_hn(c.cohomology_hn(s.position), "H^" + std::to_string(s.position));
      if (hn.size() == 1) return {SmallEpsilonShape::ShiftOfSemistableSheaf, SmallEpsilonReason::None};
      return {SmallEpsilonShape::NotSmallEpsilonSemistable, SmallEpsilonReason::UnstableSheaf};
    }
    case Sigma0Shape::ConeOfIdentity: {
      const auto hn = require_hn(c.image_hn(s.position), "im d^" + std::to_string(s.position));
      if (hn.size() == 1) return {SmallEpsilonShape::ConeOnSemistableSheaf, SmallEpsilonReason::None};
      return {SmallEpsilonShape::NotSmallEpsilonSemistable, SmallEpsilonReason::UnstableSheaf};
    }
    case Sigma0Shape::Neither: break;
  }
  return {SmallEpsilonShape::NotSmallEpsilonSemistable, SmallEpsilonReason::MultiplePieces};
}

/// The complex carried by one refined quotient: a shifted sheaf or a cone, with the
/// piece itself as its single HN quotient.
inline FormalComplex piece_complex(const LabeledPiece& p, const SessionConfig& cfg) {
  const SheafClass s = p.piece[p.label.index];
  if (p.label.kind == PieceKind::Cohomology) return sheaf_complex(s, p.label.index, cfg);
  return cone_of_identity(s, p.label.index, cfg);
}

// ---------------------------------------------------------------------------
// Structural test family

/// Proper steps of the sigma = 0 filtration together with proper steps of the refined
/// filtration (when HN data is available), without duplicates.
inline std::vector<ComplexClass> structural_test_family(const FormalComplex& c) {
  std::vector<ComplexClass> out;
  const ComplexClass whole = c.whole();
  const auto add = [&](const ComplexClass& e) {
    if (e.is_zero() || e == whole) return;
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  };
  for (const auto& s : sigma0_hn_filtration(c).steps) add(s);
  std::vector<LabeledPiece> pieces;
  try {
    pieces = refined_pieces(c);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MissingHNData) throw;
    return out;
  }
  ComplexClass cur;
  for (const auto& p : pieces) {
    cur += p.piece;
    add(cur);
  }
  return out;
}

}  // namespace hnstrat
