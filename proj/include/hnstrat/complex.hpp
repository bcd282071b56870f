#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hnstrat/polynomial.hpp"

namespace hnstrat {

struct SessionConfig {
  int dimX = 1;
  Rational degX = 1;

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

/// (rank, Hilbert polynomial) of a sheaf. Closed under sums and differences so that
/// kernels and cohomology can be derived by bookkeeping; the zero class stands for the
/// zero sheaf and is the only class with rank 0 a valid complex may contain.
struct SheafClass {
  std::int64_t rank = 0;
  Polynomial hilbert;

  [[nodiscard]] bool is_zero() const { return rank == 0 && hilbert.is_zero(); }

  SheafClass& operator+=(const SheafClass& o) {
    rank += o.rank;
    hilbert += o.hilbert;
    return *this;
  }
  SheafClass& operator-=(const SheafClass& o) {
    rank -= o.rank;
    hilbert -= o.hilbert;
    return *this;
  }
  friend SheafClass operator+(SheafClass a, const SheafClass& b) { return a += b; }
  friend SheafClass operator-(SheafClass a, const SheafClass& b) { return a -= b; }
  friend bool operator==(const SheafClass&, const SheafClass&) = default;
};

/// Slope used for the small-epsilon threshold: second-to-top coefficient of P/rank.
/// Defined as 0 on a point.
inline Rational slope(const SheafClass& s, const SessionConfig& cfg) {
  if (cfg.dimX == 0 || s.rank == 0) return 0;
  return s.hilbert.coefficient(static_cast<std::size_t>(cfg.dimX - 1)) / s.rank;
}

inline Polynomial reduced(const SheafClass& s) {
  if (s.rank == 0) throw Error(ErrorCode::DenominatorZero, "reduced polynomial of a rank-0 class");
  return s.hilbert / Rational(s.rank);
}

/// Problems with a single sheaf class (empty when it is a valid nonzero sheaf).
inline std::vector<std::string> sheaf_problems(const SheafClass& s, const SessionConfig& cfg) {
  std::vector<std::string> out;
  if (s.rank <= 0) {
    out.push_back("rank must be positive, got " + std::to_string(s.rank));
    return out;
  }
  if (cfg.dimX == 0) {
    if (s.hilbert != Polynomial::constant(Rational(s.rank)))
      out.push_back("on a point the Hilbert polynomial must equal the rank");
    return out;
  }
  if (s.hilbert.degree() != Degree(cfg.dimX))
    out.push_back("Hilbert polynomial degree must equal dimX = " + std::to_string(cfg.dimX));
  const Rational expected =
      Rational(s.rank) * cfg.degX / factorial(static_cast<unsigned>(cfg.dimX));
  if (s.hilbert.leading() != expected)
    out.push_back("leading coefficient " + to_string(s.hilbert.leading()) + " != rank*degX/dimX! = " +
                  to_string(expected));
  return out;
}

/// Per-position classes of a complex, subcomplex or quotient; absent positions are zero.
class ComplexClass {
 public:
  ComplexClass() = default;
  explicit ComplexClass(std::map<int, SheafClass> pieces) : pieces_(std::move(pieces)) { prune(); }

  static ComplexClass at(int position, const SheafClass& s) {
    return ComplexClass(std::map<int, SheafClass>{{position, s}});
  }

  [[nodiscard]] SheafClass operator[](int i) const {
    auto it = pieces_.find(i);
    return it == pieces_.end() ? SheafClass{} : it->second;
  }
  void set(int i, const SheafClass& s) {
    if (s.is_zero()) pieces_.erase(i);
    else pieces_[i] = s;
  }
  [[nodiscard]] const std::map<int, SheafClass>& pieces() const noexcept { return pieces_; }
  [[nodiscard]] bool is_zero() const noexcept { return pieces_.empty(); }

  [[nodiscard]] std::int64_t total_rank() const {
    std::int64_t r = 0;
    for (const auto& [i, s] : pieces_) r += s.rank;
    return r;
  }
  [[nodiscard]] Polynomial total_hilbert() const {
    Polynomial p;
    for (const auto& [i, s] : pieces_) p += s.hilbert;
    return p;
  }

  ComplexClass& operator+=(const ComplexClass& o) {
    for (const auto& [i, s] : o.pieces_) pieces_[i] += s;
    prune();
    return *this;
  }
  ComplexClass& operator-=(const ComplexClass& o) {
    for (const auto& [i, s] : o.pieces_) pieces_[i] -= s;
    prune();
    return *this;
  }
  friend ComplexClass operator+(ComplexClass a, const ComplexClass& b) { return a += b; }
  friend ComplexClass operator-(ComplexClass a, const ComplexClass& b) { return a -= b; }
  friend bool operator==(const ComplexClass&, const ComplexClass&) = default;

  [[nodiscard]] ComplexClass shifted(int k) const {
    std::map<int, SheafClass> out;
    for (const auto& [i, s] : pieces_) out[i + k] = s;
    return ComplexClass(std::move(out));
  }

 private:
  void prune() {
    std::erase_if(pieces_, [](const auto& kv) { return kv.second.is_zero(); });
  }

  std::map<int, SheafClass> pieces_;
};

using SubcomplexInvariants = ComplexClass;

/// Bounded complex described by its terms and the classes of the boundary images.
/// Kernels and cohomology are derived.
struct FormalComplex {
  SessionConfig config;
  int m1 = 0;
  int m2 = 0;
  std::map<int, SheafClass> terms;
  std::map<int, SheafClass> images;
  std::map<int, std::vector<SheafClass>> cohomologyHN;
  std::map<int, std::vector<SheafClass>> imageHN;

  [[nodiscard]] SheafClass term(int i) const { return lookup(terms, i); }
  [[nodiscard]] SheafClass image(int i) const { return lookup(images, i); }
  [[nodiscard]] SheafClass kernel(int i) const { return term(i) - image(i); }
  [[nodiscard]] SheafClass cohomology(int i) const { return kernel(i) - image(i - 1); }

  [[nodiscard]] ComplexClass whole() const { return ComplexClass(terms); }

  /// HN quotients of H^i; a zero cohomology sheaf has an empty list even without data.
  [[nodiscard]] std::optional<std::vector<SheafClass>> cohomology_hn(int i) const {
    return hn_lookup(cohomologyHN, i, cohomology(i));
  }
  [[nodiscard]] std::optional<std::vector<SheafClass>> image_hn(int i) const {
    return hn_lookup(imageHN, i, image(i));
  }

  friend bool operator==(const FormalComplex&, const FormalComplex&) = default;

 private:
  static SheafClass lookup(const std::map<int, SheafClass>& m, int i) {
    auto it = m.find(i);
    return it == m.end() ? SheafClass{} : it->second;
  }
  static std::optional<std::vector<SheafClass>> hn_lookup(
      const std::map<int, std::vector<SheafClass>>& m, int i, const SheafClass& ambient) {
    auto it = m.find(i);
    if (it != m.end()) return it->second;
    if (ambient.is_zero()) return std::vector<SheafClass>{};
    return std::nullopt;
  }
};

namespace detail {

inline std::string at(const std::string& what, int i) { return what + "[" + std::to_string(i) + "]"; }

inline void check_hn_list(const std::vector<SheafClass>& list, const SheafClass& ambient,
                          const std::string& where, const SessionConfig& cfg,
                          std::vector<std::string>& out) {
  SheafClass sum;
  for (std::size_t j = 0; j < list.size(); ++j) {
    for (const auto& p : sheaf_problems(list[j], cfg))
      out.push_back(where + "[" + std::to_string(j) + "]: " + p);
    sum += list[j];
  }
  for (std::size_t j = 1; j < list.size(); ++j) {
    if (list[j - 1].rank <= 0 || list[j].rank <= 0) continue;
    if (!asymptotically_greater(reduced(list[j - 1]), reduced(list[j])))
      out.push_back(where + ": reduced Hilbert polynomials must strictly decrease at " +
                    std::to_string(j));
  }
  if (sum != ambient) out.push_back(where + ": quotients do not sum to the ambient sheaf");
}

}  // namespace detail

/// Every violated invariant of c, sorted; empty means valid.
inline std::vector<std::string> validate_complex(const FormalComplex& c) {
  std::vector<std::string> out;
  const SessionConfig& cfg = c.config;
  if (cfg.dimX < 0) out.push_back("dimX must be nonnegative");
  if (cfg.degX <= 0) out.push_back("degX must be positive");
  if (!out.empty()) return out;
  if (c.m1 > c.m2) {
    out.push_back("m1 must not exceed m2");
    return out;
  }
  for (const auto& [i, s] : c.terms)
    if (i < c.m1 || i > c.m2) out.push_back(detail::at("terms", i) + ": outside [m1, m2]");
  for (const auto& [i, s] : c.images)
    if (i < c.m1 || i >= c.m2) out.push_back(detail::at("images", i) + ": outside [m1, m2)");
  for (const auto& [i, s] : c.cohomologyHN)
    if (i < c.m1 || i > c.m2) out.push_back(detail::at("cohomologyHN", i) + ": outside [m1, m2]");
  for (const auto& [i, s] : c.imageHN)
    if (i < c.m1 || i >= c.m2) out.push_back(detail::at("imageHN", i) + ": outside [m1, m2)");

  if (c.term(c.m1).is_zero()) out.push_back(detail::at("terms", c.m1) + ": end term must be nonzero");
  if (c.term(c.m2).is_zero()) out.push_back(detail::at("terms", c.m2) + ": end term must be nonzero");

  for (int i = c.m1; i <= c.m2; ++i) {
    const SheafClass t = c.term(i);
    if (!t.is_zero())
      for (const auto& p : sheaf_problems(t, cfg)) out.push_back(detail::at("terms", i) + ": " + p);
  }
  for (int i = c.m1; i < c.m2; ++i) {
    const SheafClass im = c.image(i);
    if (im.is_zero()) continue;
    for (const auto& p : sheaf_problems(im, cfg)) out.push_back(detail::at("images", i) + ": " + p);
    if (im.rank > std::min(c.term(i).rank, c.term(i + 1).rank))
      out.push_back(detail::at("images", i) + ": rank exceeds min(rank F^i, rank F^(i+1))");
  }
  for (int i = c.m1; i <= c.m2; ++i) {
    const auto check_derived = [&](const SheafClass& s, const std::string& what) {
      if (s.rank < 0) out.push_back(detail::at(what, i) + ": negative rank");
      if (!asymptotically_nonnegative(s.hilbert))
        out.push_back(detail::at(what, i) + ": Hilbert polynomial not asymptotically nonnegative");
      if (s.rank == 0 && !s.hilbert.is_zero())
        out.push_back(detail::at(what, i) + ": rank 0 with nonzero Hilbert polynomial (torsion)");
    };
    check_derived(c.kernel(i), "ker");
    check_derived(c.cohomology(i), "H");
  }
  for (const auto& [i, list] : c.cohomologyHN)
    detail::check_hn_list(list, c.cohomology(i), detail::at("cohomologyHN", i), cfg, out);
  for (const auto& [i, list] : c.imageHN)
    detail::check_hn_list(list, c.image(i), detail::at("imageHN", i), cfg, out);

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline void require_valid(const FormalComplex& c) {
  const auto problems = validate_complex(c);
  if (!problems.empty()) throw Error(ErrorCode::InvalidInput, "invalid complex: " + problems.front());
}

inline FormalComplex shift(const FormalComplex& c, int k) {
  FormalComplex out;
  out.config = c.config;
  out.m1 = c.m1 + k;
  out.m2 = c.m2 + k;
  for (const auto& [i, s] : c.terms) out.terms[i + k] = s;
  for (const auto& [i, s] : c.images) out.images[i + k] = s;
  for (const auto& [i, l] : c.cohomologyHN) out.cohomologyHN[i + k] = l;
  for (const auto& [i, l] : c.imageHN) out.imageHN[i + k] = l;
  return out;
}

/// The sheaf s placed at one position with zero boundary maps.
inline FormalComplex sheaf_complex(const SheafClass& s, int position, const SessionConfig& cfg,
                                   std::optional<std::vector<SheafClass>> hn = std::nullopt) {
  FormalComplex out;
  out.config = cfg;
  out.m1 = out.m2 = position;
  out.terms[position] = s;
  out.cohomologyHN[position] = hn ? *hn : std::vector<SheafClass>{s};
  return out;
}

/// s -> s with the identity at (position, position + 1). Without explicit HN data the
/// sheaf is recorded as its own single HN quotient.
inline FormalComplex cone_of_identity(const SheafClass& s, int position, const SessionConfig& cfg,
                                      std::optional<std::vector<SheafClass>> hn = std::nullopt) {
  FormalComplex out;
  out.config = cfg;
  out.m1 = position;
  out.m2 = position + 1;
  out.terms[position] = s;
  out.terms[position + 1] = s;
  out.images[position] = s;
  out.cohomologyHN[position] = {};
  out.cohomologyHN[position + 1] = {};
  out.imageHN[position] = hn ? *hn : std::vector<SheafClass>{s};
  return out;
}

// ---------------------------------------------------------------------------
// Filtrations and types

enum class PieceKind { Cohomology, Cone };

/// CohomologyPiece(i, j) or ConePiece(i, j); j is absent for the unrefined sigma = 0 pieces.
struct PieceLabel {
  PieceKind kind = PieceKind::Cohomology;
  int index = 0;
  std::optional<int> sub;

  friend bool operator==(const PieceLabel&, const PieceLabel&) = default;
  friend auto operator<=>(const PieceLabel&, const PieceLabel&) = default;
};

inline std::string to_string(const PieceLabel& l) {
  std::string out = l.kind == PieceKind::Cohomology ? "H(" : "I(";
  out += std::to_string(l.index);
  if (l.sub) out += "," + std::to_string(*l.sub);
  return out + ")";
}

struct LabeledPiece {
  PieceLabel label;
  ComplexClass piece;

  friend bool operator==(const LabeledPiece&, const LabeledPiece&) = default;
};

struct HNFiltration {
  std::vector<ComplexClass> steps;
  std::vector<LabeledPiece> quotients;
};

/// Ordered Hilbert-polynomial vectors of the HN quotients, labelled as in the refined
/// filtration.
struct HNType {
  std::vector<LabeledPiece> entries;

  [[nodiscard]] ComplexClass total() const {
    ComplexClass sum;
    for (const auto& e : entries) sum += e.piece;
    return sum;
  }
};

}  // namespace hnstrat
