#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hnstrat/hn.hpp"

namespace hnstrat {

// ---------------------------------------------------------------------------
// Linear algebra over F_p

namespace gf {

using Vec = std::vector<int>;

inline bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

inline int inverse(int a, int p) {
  int result = 1;
  int base = a % p;
  for (int e = p - 2; e > 0; e >>= 1) {
    if (e & 1) result = result * base % p;
    base = base * base % p;
  }
  return result;
}

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0) {}

  [[nodiscard]] int& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  [[nodiscard]] int at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  [[nodiscard]] bool is_zero() const {
    return std::all_of(data.begin(), data.end(), [](int v) { return v == 0; });
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

inline Matrix multiply(const Matrix& a, const Matrix& b, int p) {
  Matrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const int v = a.at(i, k);
      if (v == 0) continue;
      for (int j = 0; j < b.cols; ++j) out.at(i, j) = (out.at(i, j) + v * b.at(k, j)) % p;
    }
  return out;
}

inline Vec apply(const Matrix& m, const Vec& v, int p) {
  Vec out(static_cast<std::size_t>(m.rows), 0);
  for (int i = 0; i < m.rows; ++i) {
    int acc = 0;
    for (int j = 0; j < m.cols; ++j) acc += m.at(i, j) * v[j];
    out[i] = acc % p;
  }
  return out;
}

/// Reduced row echelon form of the span of rows; zero rows dropped.
inline std::vector<Vec> rref(std::vector<Vec> rows, int n, int p) {
  std::size_t rank = 0;
  for (int col = 0; col < n && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][col] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    const int inv = inverse(rows[rank][col], p);
    for (auto& v : rows[rank]) v = v * inv % p;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][col] == 0) continue;
      const int f = rows[r][col];
      for (int c = 0; c < n; ++c) rows[r][c] = ((rows[r][c] - f * rows[rank][c]) % p + p) % p;
    }
    ++rank;
  }
  rows.resize(rank);
  return rows;
}

inline int rank(const Matrix& m, int p) {
  std::vector<Vec> rows;
  for (int r = 0; r < m.rows; ++r) rows.emplace_back(m.data.begin() + r * m.cols, m.data.begin() + (r + 1) * m.cols);
  return static_cast<int>(rref(std::move(rows), m.cols, p).size());
}

/// Subspace of F_p^n stored by its reduced echelon basis, which makes equality canonical.
struct Subspace {
  int n = 0;
  std::vector<Vec> basis;

  [[nodiscard]] int dim() const { return static_cast<int>(basis.size()); }
  friend bool operator==(const Subspace&, const Subspace&) = default;
  friend auto operator<=>(const Subspace&, const Subspace&) = default;
};

inline Subspace span(std::vector<Vec> vectors, int n, int p) { return {n, rref(std::move(vectors), n, p)}; }

inline bool contains(const Subspace& s, const Vec& v, int p) {
  Vec r = v;
  for (const auto& b : s.basis) {
    int col = 0;
    while (b[col] == 0) ++col;
    const int f = r[col];
    if (f == 0) continue;
    for (int c = 0; c < s.n; ++c) r[c] = ((r[c] - f * b[c]) % p + p) % p;
  }
  return std::all_of(r.begin(), r.end(), [](int x) { return x == 0; });
}

inline bool is_subset(const Subspace& a, const Subspace& b, int p) {
  if (a.dim() > b.dim()) return false;
  return std::all_of(a.basis.begin(), a.basis.end(), [&](const Vec& v) { return contains(b, v, p); });
}

inline Subspace image(const Matrix& m, const Subspace& s, int p) {
  std::vector<Vec> out;
  for (const auto& v : s.basis) out.push_back(apply(m, v, p));
  return span(std::move(out), m.rows, p);
}

/// Every subspace of F_p^n, each once, by pivot pattern and free entries.
inline std::vector<Subspace> all_subspaces(int n, int p) {
  std::vector<Subspace> out;
  for (int k = 0; k <= n; ++k) {
    std::vector<int> pivots(static_cast<std::size_t>(k));
    std::function<void(int, int)> choose = [&](int from, int idx) {
      if (idx == k) {
        std::vector<std::pair<int, int>> free;
        for (int r = 0; r < k; ++r)
          for (int c = pivots[r] + 1; c < n; ++c)
            if (std::find(pivots.begin(), pivots.end(), c) == pivots.end()) free.push_back({r, c});
        std::vector<int> digits(free.size(), 0);
        while (true) {
          Subspace s{n, std::vector<Vec>(static_cast<std::size_t>(k), Vec(static_cast<std::size_t>(n), 0))};
          for (int r = 0; r < k; ++r) s.basis[r][pivots[r]] = 1;
          for (std::size_t f = 0; f < free.size(); ++f) s.basis[free[f].first][free[f].second] = digits[f];
          out.push_back(std::move(s));
          std::size_t pos = 0;
          while (pos < digits.size() && ++digits[pos] == p) digits[pos++] = 0;
          if (pos == digits.size()) break;
        }
        return;
      }
      for (int c = from; c < n; ++c) {
        pivots[idx] = c;
        choose(c + 1, idx + 1);
      }
    };
    choose(0, 0);
  }
  return out;
}

/// Number of subspaces of F_p^n (sum of Gaussian binomials).
inline Integer count_subspaces(int n, int p) {
  Integer total = 0;
  for (int k = 0; k <= n; ++k) {
    Integer num = 1;
    Integer den = 1;
    for (int i = 0; i < k; ++i) {
      num *= boost::multiprecision::pow(Integer(p), n - i) - 1;
      den *= boost::multiprecision::pow(Integer(p), i + 1) - 1;
    }
    total += num / den;
  }
  return total;
}

}  // namespace gf

// ---------------------------------------------------------------------------
// Concrete complexes

/// maps[k] goes from position m1 + k to m1 + k + 1 and has shape dims[k+1] x dims[k].
struct FiniteComplex {
  int p = 2;
  int m1 = 0;
  std::vector<int> dims;
  std::vector<gf::Matrix> maps;

  [[nodiscard]] int length() const { return static_cast<int>(dims.size()); }
  [[nodiscard]] int m2() const { return m1 + length() - 1; }

  friend bool operator==(const FiniteComplex&, const FiniteComplex&) = default;
};

inline std::vector<std::string> validate_finite(const FiniteComplex& c) {
  std::vector<std::string> out;
  if (!gf::is_prime(c.p) || c.p > 251) out.push_back("p must be a prime below 256");
  if (c.dims.empty()) out.push_back("no positions");
  if (!out.empty()) return out;
  if (c.dims.front() <= 0 || c.dims.back() <= 0) out.push_back("end dimensions must be positive");
  for (int d : c.dims)
    if (d < 0) out.push_back("negative dimension");
  if (c.maps.size() + 1 != c.dims.size()) {
    out.push_back("expected " + std::to_string(c.dims.size() - 1) + " maps");
    return out;
  }
  for (std::size_t k = 0; k < c.maps.size(); ++k) {
    const auto& m = c.maps[k];
    if (m.rows != c.dims[k + 1] || m.cols != c.dims[k] ||
        m.data.size() != static_cast<std::size_t>(m.rows) * m.cols)
      out.push_back("map " + std::to_string(k) + " has the wrong shape");
    for (int v : m.data)
      if (v < 0 || v >= c.p) {
        out.push_back("map " + std::to_string(k) + " has an entry outside [0, p)");
        break;
      }
  }
  if (!out.empty()) return out;
  for (std::size_t k = 0; k + 1 < c.maps.size(); ++k)
    if (!gf::multiply(c.maps[k + 1], c.maps[k], c.p).is_zero())
      out.push_back("d^" + std::to_string(k + 1) + " d^" + std::to_string(k) + " != 0");
  return out;
}

inline std::int64_t default_budget() {
  if (const char* env = std::getenv("HNSTRAT_BUDGET")) {
    try {
      return to_int64(parse_integer(env));
    } catch (const Error&) {
    }
  }
  return 1'000'000;
}

/// Class of a dimension vector at dim X = 0: rank = dimension, constant Hilbert polynomial.
inline ComplexClass class_of_dims(const std::vector<int>& dims, int m1) {
  ComplexClass out;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (dims[k] > 0) out.set(m1 + static_cast<int>(k), {dims[k], Polynomial::constant(dims[k])});
  return out;
}

inline std::vector<int> dims_of_class(const ComplexClass& c, int m1, int length) {
  std::vector<int> out(static_cast<std::size_t>(length), 0);
  for (const auto& [i, s] : c.pieces()) {
    const int k = i - m1;
    if (k < 0 || k >= length) throw Error(ErrorCode::InvalidInput, "class outside the complex range");
    out[k] = static_cast<int>(s.rank);
  }
  return out;
}

/// Formal invariants of a concrete complex seen as a complex of sheaves on a point.
inline FormalComplex extract_invariants(const FiniteComplex& c) {
  FormalComplex out;
  out.config = {0, 1};
  out.m1 = c.m1;
  out.m2 = c.m2();
  const auto sheaf = [](int d) { return SheafClass{d, Polynomial::constant(d)}; };
  for (int k = 0; k < c.length(); ++k)
    if (c.dims[k] > 0) out.terms[c.m1 + k] = sheaf(c.dims[k]);
  for (int k = 0; k + 1 < c.length(); ++k) {
    const int r = gf::rank(c.maps[k], c.p);
    if (r > 0) {
      out.images[c.m1 + k] = sheaf(r);
      out.imageHN[c.m1 + k] = {sheaf(r)};
    }
  }
  for (int i = out.m1; i <= out.m2; ++i) {
    const SheafClass h = out.cohomology(i);
    if (!h.is_zero()) out.cohomologyHN[i] = {h};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subcomplex lattice

class SubcomplexLattice {
 public:
  SubcomplexLattice(const FiniteComplex& c, std::int64_t budget) : c_(c) {
    const auto problems = validate_finite(c);
    if (!problems.empty()) throw Error(ErrorCode::InvalidInput, "invalid finite complex: " + problems.front());
    Integer product = 1;
    for (int d : c.dims) product *= gf::count_subspaces(d, c.p);
    if (product > budget)
      throw Error(ErrorCode::BudgetExceeded, "subspace tuples " + product.str() + " exceed budget " + std::to_string(budget));
    const int L = c.length();
    spaces_.resize(L);
    subset_.resize(L);
    for (int k = 0; k < L; ++k) {
      spaces_[k] = gf::all_subspaces(c.dims[k], c.p);
      const std::size_t s = spaces_[k].size();
      subset_[k].assign(s * s, 0);
      for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = 0; b < s; ++b) subset_[k][a * s + b] = gf::is_subset(spaces_[k][a], spaces_[k][b], c.p);
    }
    maps_into_.resize(L > 0 ? L - 1 : 0);
    for (int k = 0; k + 1 < L; ++k) {
      const std::size_t s0 = spaces_[k].size();
      const std::size_t s1 = spaces_[k + 1].size();
      maps_into_[k].assign(s0 * s1, 0);
      for (std::size_t a = 0; a < s0; ++a) {
        const gf::Subspace img = gf::image(c.maps[k], spaces_[k][a], c.p);
        for (std::size_t b = 0; b < s1; ++b) maps_into_[k][a * s1 + b] = gf::is_subset(img, spaces_[k + 1][b], c.p);
      }
    }
    std::vector<int> cur(static_cast<std::size_t>(L), 0);
    std::function<void(int)> dfs = [&](int k) {
      if (k == L) {
        tuples_.push_back(cur);
        return;
      }
      for (std::size_t a = 0; a < spaces_[k].size(); ++a) {
        if (k > 0 && !maps_into_[k - 1][static_cast<std::size_t>(cur[k - 1]) * spaces_[k].size() + a]) continue;
        cur[k] = static_cast<int>(a);
        dfs(k + 1);
      }
    };
    dfs(0);
    for (const auto& t : tuples_) {
      std::vector<int> d;
      for (int k = 0; k < L; ++k) d.push_back(spaces_[k][t[k]].dim());
      dims_.push_back(std::move(d));
    }
  }

  [[nodiscard]] const FiniteComplex& complex() const noexcept { return c_; }
  [[nodiscard]] std::size_t size() const noexcept { return tuples_.size(); }
  [[nodiscard]] const std::vector<int>& tuple(std::size_t t) const { return tuples_[t]; }
  [[nodiscard]] const std::vector<int>& dims(std::size_t t) const { return dims_[t]; }
  [[nodiscard]] const gf::Subspace& space(int k, int idx) const { return spaces_[k][idx]; }

  [[nodiscard]] std::vector<gf::Subspace> bases(std::size_t t) const {
    std::vector<gf::Subspace> out;
    for (int k = 0; k < c_.length(); ++k) out.push_back(spaces_[k][tuples_[t][k]]);
    return out;
  }

  /// Componentwise inclusion of subcomplexes t and u.
  [[nodiscard]] bool leq(std::size_t t, std::size_t u) const {
    for (int k = 0; k < c_.length(); ++k) {
      const std::size_t s = spaces_[k].size();
      if (!subset_[k][static_cast<std::size_t>(tuples_[t][k]) * s + tuples_[u][k]]) return false;
    }
    return true;
  }

  [[nodiscard]] bool is_zero(std::size_t t) const {
    return std::all_of(dims_[t].begin(), dims_[t].end(), [](int d) { return d == 0; });
  }
  [[nodiscard]] bool is_whole(std::size_t t) const { return dims_[t] == c_.dims; }

 private:
  FiniteComplex c_;
  std::vector<std::vector<gf::Subspace>> spaces_;
  std::vector<std::vector<std::uint8_t>> subset_;
  std::vector<std::vector<std::uint8_t>> maps_into_;
  std::vector<std::vector<int>> tuples_;
  std::vector<std::vector<int>> dims_;
};

inline SubcomplexLattice enumerate_subcomplexes(const FiniteComplex& c, std::int64_t budget = default_budget()) {
  return SubcomplexLattice(c, budget);
}

namespace detail {

/// Eta scaled to integers, so that averages compare by cross multiplication.
class EtaWeights {
 public:
  EtaWeights(const std::map<int, Rational>& eta, int m1, int length) {
    Integer l = 1;
    for (int k = 0; k < length; ++k) l = lcm_integer(l, denominator_of(lookup(eta, m1 + k)));
    for (int k = 0; k < length; ++k) w_.push_back(to_int64(numerator_of(lookup(eta, m1 + k) * Rational(l))));
  }

  [[nodiscard]] std::int64_t num(const std::vector<int>& dims) const {
    std::int64_t s = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) s += w_[k] * dims[k];
    return s;
  }
  static std::int64_t den(const std::vector<int>& dims) {
    std::int64_t s = 0;
    for (int d : dims) s += d;
    return s;
  }

 private:
  static Rational lookup(const std::map<int, Rational>& eta, int i) {
    auto it = eta.find(i);
    if (it == eta.end()) throw Error(ErrorCode::InvalidInput, "no eta value for position " + std::to_string(i));
    return it->second;
  }
  std::vector<std::int64_t> w_;
};

/// Sign of avg(a) - avg(b) for averages given as num / den with positive dens.
inline int compare_avg(std::int64_t na, std::int64_t da, std::int64_t nb, std::int64_t db) {
  const __int128 l = static_cast<__int128>(na) * db;
  const __int128 r = static_cast<__int128>(nb) * da;
  return l < r ? -1 : (l > r ? 1 : 0);
}

}  // namespace detail

/// Among subcomplexes strictly containing base: the unique W with W / base semistable
/// for the sigma = 0 condition and with strictly smaller quotient eta-average than every
/// strictly larger subcomplex. With base = 0 this is the maximal destabilizer.
inline std::size_t brute_relative_max_destabilizer(const SubcomplexLattice& lat, const std::map<int, Rational>& eta,
                                                   std::size_t base) {
  const FiniteComplex& c = lat.complex();
  const detail::EtaWeights w(eta, c.m1, c.length());
  const std::int64_t nb = w.num(lat.dims(base));
  const std::int64_t db = detail::EtaWeights::den(lat.dims(base));
  std::vector<std::size_t> above;
  for (std::size_t t = 0; t < lat.size(); ++t)
    if (t != base && lat.leq(base, t)) above.push_back(t);
  std::vector<std::size_t> winners;
  for (std::size_t W : above) {
    const std::int64_t nw = w.num(lat.dims(W)) - nb;
    const std::int64_t dw = detail::EtaWeights::den(lat.dims(W)) - db;
    bool ok = true;
    for (std::size_t V : above) {
      if (V == W) continue;
      const std::int64_t nv = w.num(lat.dims(V)) - nb;
      const std::int64_t dv = detail::EtaWeights::den(lat.dims(V)) - db;
      if (lat.leq(V, W)) {
        if (detail::compare_avg(nv, dv, nw, dw) < 0) ok = false;
      } else if (lat.leq(W, V)) {
        if (detail::compare_avg(nw, dw, nv, dv) >= 0) ok = false;
      }
      if (!ok) break;
    }
    if (ok) winners.push_back(W);
  }
  if (winners.size() != 1)
    throw Error(ErrorCode::NonUnique, std::to_string(winners.size()) + " candidates for the maximal destabilizer");
  return winners.front();
}

inline std::size_t zero_subcomplex(const SubcomplexLattice& lat) {
  for (std::size_t t = 0; t < lat.size(); ++t)
    if (lat.is_zero(t)) return t;
  throw Error(ErrorCode::InvalidInput, "lattice without the zero subcomplex");
}

inline std::size_t brute_sigma0_max_destabilizer(const SubcomplexLattice& lat, const std::map<int, Rational>& eta) {
  return brute_relative_max_destabilizer(lat, eta, zero_subcomplex(lat));
}

/// Successive relative maximal destabilizers up to the whole complex.
inline std::vector<std::size_t> brute_sigma0_hn_filtration(const SubcomplexLattice& lat,
                                                           const std::map<int, Rational>& eta) {
  std::vector<std::size_t> steps;
  std::size_t cur = zero_subcomplex(lat);
  while (!lat.is_whole(cur)) {
    cur = brute_relative_max_destabilizer(lat, eta, cur);
    steps.push_back(cur);
  }
  return steps;
}

struct BruteVerdict {
  VerdictKind kind = VerdictKind::Semistable;
  std::optional<std::size_t> witness;
  Sigma0Class structural;
  bool agrees = false;
};

/// The sigma = 0 inequality over every nonzero proper subcomplex, next to the structural
/// classification of the extracted invariants.
inline BruteVerdict brute_semistable_dim0(const SubcomplexLattice& lat, const std::map<int, Rational>& eta) {
  const FiniteComplex& c = lat.complex();
  const detail::EtaWeights w(eta, c.m1, c.length());
  const std::int64_t nf = w.num(c.dims);
  const std::int64_t df = detail::EtaWeights::den(c.dims);
  BruteVerdict out;
  bool all_strict = true;
  bool any = false;
  for (std::size_t t = 0; t < lat.size(); ++t) {
    if (lat.is_zero(t) || lat.is_whole(t)) continue;
    any = true;
    const int cmp = detail::compare_avg(w.num(lat.dims(t)), detail::EtaWeights::den(lat.dims(t)), nf, df);
    if (cmp < 0) {
      out.kind = VerdictKind::Destabilized;
      out.witness = t;
      break;
    }
    if (cmp == 0) all_strict = false;
  }
  if (out.kind != VerdictKind::Destabilized && any && all_strict) out.kind = VerdictKind::Stable;
  out.structural = sigma0_classify(extract_invariants(c));
  out.agrees = out.structural.semistable() == (out.kind != VerdictKind::Destabilized);
  return out;
}

// ---------------------------------------------------------------------------
// One-parameter subgroup limits

struct WeightSpace {
  std::int64_t weight = 0;
  std::vector<gf::Vec> basis;
};

/// Per position (index k = position - m1), a direct sum decomposition into weight spaces.
using WeightDecomposition = std::vector<std::vector<WeightSpace>>;

struct SurvivingBlock {
  int position = 0;
  std::int64_t fromWeight = 0;
  std::int64_t toWeight = 0;
};

struct LimitResult {
  bool compatible = true;
  std::optional<std::int64_t> crossing;
  /// Limit maps written in the adapted bases (weight spaces in decreasing weight order).
  FiniteComplex limit;
  std::vector<SurvivingBlock> surviving;
  bool squareZero = true;
  /// Quotient dimensions dim V^i_j per global weight, in decreasing weight order.
  std::vector<std::int64_t> weights;
  std::map<int, std::vector<std::int64_t>> blockDims;
};

namespace detail {

struct Adapted {
  std::vector<gf::Vec> columns;
  std::vector<std::int64_t> columnWeight;
};

inline Adapted adapted_basis(const std::vector<WeightSpace>& spaces, int n, int p, int position) {
  Adapted out;
  std::vector<const WeightSpace*> order;
  for (const auto& s : spaces) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](const WeightSpace* a, const WeightSpace* b) { return a->weight > b->weight; });
  for (std::size_t k = 1; k < order.size(); ++k)
    if (order[k]->weight == order[k - 1]->weight)
      throw Error(ErrorCode::MalformedDecomposition, "repeated weight at position " + std::to_string(position));
  for (const auto* s : order)
    for (const auto& v : s->basis) {
      if (static_cast<int>(v.size()) != n)
        throw Error(ErrorCode::MalformedDecomposition, "vector of wrong length at position " + std::to_string(position));
      for (int x : v)
        if (x < 0 || x >= p) throw Error(ErrorCode::MalformedDecomposition, "entry outside [0, p)");
      out.columns.push_back(v);
      out.columnWeight.push_back(s->weight);
    }
  if (static_cast<int>(out.columns.size()) != n || static_cast<int>(gf::rref(out.columns, n, p).size()) != n)
    throw Error(ErrorCode::MalformedDecomposition, "weight spaces do not form a direct sum decomposition at position " +
                                                       std::to_string(position));
  return out;
}

/// Inverse of a square invertible matrix by Gauss-Jordan.
inline gf::Matrix invert(const gf::Matrix& m, int p) {
  const int n = m.rows;
  gf::Matrix a = m;
  gf::Matrix inv(n, n);
  for (int i = 0; i < n; ++i) inv.at(i, i) = 1;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    while (piv < n && a.at(piv, col) == 0) ++piv;
    if (piv == n) throw Error(ErrorCode::MalformedDecomposition, "singular basis");
    for (int c = 0; c < n; ++c) {
      std::swap(a.at(col, c), a.at(piv, c));
      std::swap(inv.at(col, c), inv.at(piv, c));
    }
    const int s = gf::inverse(a.at(col, col), p);
    for (int c = 0; c < n; ++c) {
      a.at(col, c) = a.at(col, c) * s % p;
      inv.at(col, c) = inv.at(col, c) * s % p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || a.at(r, col) == 0) continue;
      const int f = a.at(r, col);
      for (int c = 0; c < n; ++c) {
        a.at(r, c) = ((a.at(r, c) - f * a.at(col, c)) % p + p) % p;
        inv.at(r, c) = ((inv.at(r, c) - f * inv.at(col, c)) % p + p) % p;
      }
    }
  }
  return inv;
}

inline gf::Matrix column_matrix(const std::vector<gf::Vec>& cols, int n) {
  gf::Matrix m(n, static_cast<int>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (int i = 0; i < n; ++i) m.at(i, static_cast<int>(j)) = cols[j][i];
  return m;
}

inline std::vector<std::int64_t> global_weights(const WeightDecomposition& lambda) {
  std::vector<std::int64_t> out;
  for (const auto& pos : lambda)
    for (const auto& s : pos)
      if (!s.basis.empty()) out.push_back(s.weight);
  std::sort(out.begin(), out.end(), std::greater<>());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

/// Conjugating d^i by lambda(t) scales the block from weight k_j to weight k_l by
/// t^(k_l - k_j). Compatible when no block has a negative exponent; the limit then keeps
/// the weight-preserving blocks. Otherwise N is the smallest exponent and the limit of
/// the rescaled maps keeps the blocks with exponent N.
inline LimitResult one_ps_limit(const FiniteComplex& c, const WeightDecomposition& lambda) {
  const auto problems = validate_finite(c);
  if (!problems.empty()) throw Error(ErrorCode::InvalidInput, "invalid finite complex: " + problems.front());
  if (static_cast<int>(lambda.size()) != c.length())
    throw Error(ErrorCode::MalformedDecomposition, "decomposition does not cover every position");
  const int p = c.p;
  std::vector<detail::Adapted> adapted;
  for (int k = 0; k < c.length(); ++k) adapted.push_back(detail::adapted_basis(lambda[k], c.dims[k], p, c.m1 + k));

  LimitResult out;
  out.weights = detail::global_weights(lambda);
  for (int k = 0; k < c.length(); ++k) {
    auto& dims = out.blockDims[c.m1 + k];
    dims.assign(out.weights.size(), 0);
    for (auto w : adapted[k].columnWeight)
      ++dims[std::find(out.weights.begin(), out.weights.end(), w) - out.weights.begin()];
  }

  std::vector<gf::Matrix> conj;
  std::optional<std::int64_t> min_exp;
  for (int k = 0; k + 1 < c.length(); ++k) {
    const gf::Matrix B0 = detail::column_matrix(adapted[k].columns, c.dims[k]);
    const gf::Matrix B1inv = detail::invert(detail::column_matrix(adapted[k + 1].columns, c.dims[k + 1]), p);
    const gf::Matrix D = gf::multiply(B1inv, gf::multiply(c.maps[k], B0, p), p);
    for (int r = 0; r < D.rows; ++r)
      for (int col = 0; col < D.cols; ++col) {
        if (D.at(r, col) == 0) continue;
        const std::int64_t e = adapted[k + 1].columnWeight[r] - adapted[k].columnWeight[col];
        if (!min_exp || e < *min_exp) min_exp = e;
      }
    conj.push_back(D);
  }
  out.compatible = !min_exp || *min_exp >= 0;
  const std::int64_t keep = out.compatible ? 0 : *min_exp;
  if (!out.compatible) out.crossing = keep;

  out.limit.p = p;
  out.limit.m1 = c.m1;
  out.limit.dims = c.dims;
  for (int k = 0; k + 1 < c.length(); ++k) {
    gf::Matrix L(conj[k].rows, conj[k].cols);
    for (int r = 0; r < L.rows; ++r)
      for (int col = 0; col < L.cols; ++col) {
        const std::int64_t e = adapted[k + 1].columnWeight[r] - adapted[k].columnWeight[col];
        if (e != keep || conj[k].at(r, col) == 0) continue;
        L.at(r, col) = conj[k].at(r, col);
        const SurvivingBlock blk{c.m1 + k, adapted[k].columnWeight[col], adapted[k + 1].columnWeight[r]};
        const bool seen = std::any_of(out.surviving.begin(), out.surviving.end(), [&](const SurvivingBlock& b) {
          return b.position == blk.position && b.fromWeight == blk.fromWeight && b.toWeight == blk.toWeight;
        });
        if (!seen) out.surviving.push_back(blk);
      }
    out.limit.maps.push_back(std::move(L));
  }
  for (int k = 0; k + 2 < c.length(); ++k)
    if (!gf::multiply(out.limit.maps[k + 1], out.limit.maps[k], p).is_zero()) out.squareZero = false;
  return out;
}

struct ContainmentResult {
  bool compatible = true;
  /// min of k_l - k_j over (i, j, l) with d^i(E^i_(j)) not inside E^(i+1)_(l-1).
  std::optional<std::int64_t> scanned;
};

/// Direct criterion in the original coordinates: the filtration E_(j) spanned by the
/// weight spaces of weight >= k_j, tested for d(E_(j)) inside E_(j), and the crossing value
/// by scanning every (i, j, l).
inline ContainmentResult containment_check(const FiniteComplex& c, const WeightDecomposition& lambda) {
  const int p = c.p;
  const auto weights = detail::global_weights(lambda);
  const auto filtration = [&](int k, std::size_t upto) {
    std::vector<gf::Vec> vs;
    for (const auto& s : lambda[k])
      for (std::size_t j = 0; j < upto; ++j)
        if (s.weight == weights[j]) vs.insert(vs.end(), s.basis.begin(), s.basis.end());
    return gf::span(std::move(vs), c.dims[k], p);
  };
  ContainmentResult out;
  for (int k = 0; k + 1 < c.length(); ++k) {
    for (std::size_t j = 1; j <= weights.size(); ++j) {
      const gf::Subspace img = gf::image(c.maps[k], filtration(k, j), p);
      if (!gf::is_subset(img, filtration(k + 1, j), p)) out.compatible = false;
      for (std::size_t l = 1; l <= weights.size(); ++l) {
        if (gf::is_subset(img, filtration(k + 1, l - 1), p)) continue;
        const std::int64_t e = weights[l - 1] - weights[j - 1];
        if (!out.scanned || e < *out.scanned) out.scanned = e;
      }
    }
  }
  return out;
}

/// Every decomposition of F_p^n into weight spaces with weights drawn from the list.
inline std::vector<std::vector<WeightSpace>> all_weight_decompositions(int n, int p,
                                                                      const std::vector<std::int64_t>& weights) {
  const auto spaces = gf::all_subspaces(n, p);
  std::vector<std::vector<WeightSpace>> out;
  std::vector<int> choice(weights.size(), 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t w, int used) {
    if (w == weights.size()) {
      if (used != n) return;
      std::vector<gf::Vec> all;
      std::vector<WeightSpace> dec;
      for (std::size_t k = 0; k < weights.size(); ++k) {
        const auto& s = spaces[choice[k]];
        if (s.dim() == 0) continue;
        all.insert(all.end(), s.basis.begin(), s.basis.end());
        dec.push_back({weights[k], s.basis});
      }
      if (static_cast<int>(gf::rref(all, n, p).size()) == n) out.push_back(std::move(dec));
      return;
    }
    for (std::size_t s = 0; s < spaces.size(); ++s) {
      if (used + spaces[s].dim() > n) continue;
      choice[w] = static_cast<int>(s);
      rec(w + 1, used + spaces[s].dim());
    }
  };
  rec(0, 0);
  return out;
}

struct LimitSweep {
  std::size_t decompositions = 0;
  std::vector<std::string> discrepancies;
};

/// one_ps_limit against containment_check for every weight decomposition of c with
/// weights from the list.
inline LimitSweep check_limits(const FiniteComplex& c, const std::vector<std::int64_t>& weights) {
  std::vector<std::vector<std::vector<WeightSpace>>> per_position;
  for (int d : c.dims) per_position.push_back(all_weight_decompositions(d, c.p, weights));
  LimitSweep out;
  WeightDecomposition lambda(static_cast<std::size_t>(c.length()));
  std::function<void(int)> rec = [&](int k) {
    if (k == c.length()) {
      ++out.decompositions;
      const LimitResult lim = one_ps_limit(c, lambda);
      const ContainmentResult direct = containment_check(c, lambda);
      if (lim.compatible != direct.compatible) out.discrepancies.push_back("compatibility verdict differs");
      if (!lim.compatible && lim.crossing != direct.scanned) out.discrepancies.push_back("crossing value differs");
      if (!lim.compatible && !(lim.crossing && *lim.crossing < 0)) out.discrepancies.push_back("crossing value not negative");
      if (!lim.squareZero) out.discrepancies.push_back("limit maps do not square to zero");
      if (!validate_finite(lim.limit).empty()) out.discrepancies.push_back("limit is not a complex");
      return;
    }
    for (const auto& dec : per_position[k]) {
      lambda[k] = dec;
      rec(k + 1);
    }
  };
  rec(0);
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps and cross validation

/// Every complex over F_p with 1..maxPositions positions (m1 = 0), end dimensions in
/// [1, maxDim], inner dimensions in [0, maxDim], and d^2 = 0.
inline std::vector<FiniteComplex> all_finite_complexes(int p, int maxPositions, int maxDim) {
  std::vector<FiniteComplex> out;
  for (int L = 1; L <= maxPositions; ++L) {
    std::vector<int> dims(static_cast<std::size_t>(L), 0);
    std::function<void(int)> pick_dims = [&](int k) {
      if (k == L) {
        FiniteComplex base;
        base.p = p;
        base.dims = dims;
        std::function<void(int)> pick_map = [&](int m) {
          if (m + 1 >= L) {
            if (validate_finite(base).empty()) out.push_back(base);
            return;
          }
          const int cells = dims[m + 1] * dims[m];
          Integer total = boost::multiprecision::pow(Integer(p), cells);
          for (Integer code = 0; code < total; ++code) {
            gf::Matrix M(dims[m + 1], dims[m]);
            Integer rest = code;
            for (int e = 0; e < cells; ++e) {
              M.data[e] = static_cast<int>(rest % p);
              rest /= p;
            }
            if (m > 0 && !gf::multiply(M, base.maps[m - 1], p).is_zero()) continue;
            base.maps.push_back(M);
            pick_map(m + 1);
            base.maps.pop_back();
          }
        };
        pick_map(0);
        return;
      }
      const int lo = (k == 0 || k == L - 1) ? 1 : 0;
      for (int d = lo; d <= maxDim; ++d) {
        dims[k] = d;
        pick_dims(k + 1);
      }
    };
    pick_dims(0);
  }
  return out;
}

inline FiniteComplex random_finite_complex(std::mt19937_64& rng, int p, int positions, int maxDim) {
  std::uniform_int_distribution<int> dim_dist(1, maxDim);
  std::uniform_int_distribution<int> entry(0, p - 1);
  FiniteComplex c;
  c.p = p;
  for (int k = 0; k < positions; ++k) c.dims.push_back(dim_dist(rng));
  for (int k = 0; k + 1 < positions; ++k) {
    gf::Matrix M(c.dims[k + 1], c.dims[k]);
    for (int tries = 0; tries < 64; ++tries) {
      for (auto& v : M.data) v = entry(rng);
      if (k == 0 || gf::multiply(M, c.maps[k - 1], p).is_zero()) break;
      std::fill(M.data.begin(), M.data.end(), 0);
    }
    c.maps.push_back(M);
  }
  return c;
}

struct CrossValidation {
  std::vector<std::string> discrepancies;
  std::size_t subcomplexes = 0;
  std::vector<int> bruteDestabilizer;
  std::vector<int> structuralDestabilizer;
  VerdictKind bruteVerdict = VerdictKind::Semistable;
  Sigma0Class structural;

  [[nodiscard]] bool ok() const { return discrepancies.empty(); }
};

/// Structural operations on the extracted invariants against exhaustive search.
inline CrossValidation cross_validate(const FiniteComplex& c, const std::map<int, Rational>& eta,
                                      const Rational& epsilon, const Rational& delta,
                                      std::int64_t budget = default_budget()) {
  CrossValidation out;
  const SubcomplexLattice lat(c, budget);
  out.subcomplexes = lat.size();
  const FormalComplex formal = extract_invariants(c);
  const auto formal_problems = validate_complex(formal);
  for (const auto& pr : formal_problems) out.discrepancies.push_back("extracted invariants invalid: " + pr);

  out.structuralDestabilizer = dims_of_class(sigma0_max_destabilizer(formal), c.m1, c.length());
  try {
    out.bruteDestabilizer = lat.dims(brute_sigma0_max_destabilizer(lat, eta));
    if (out.bruteDestabilizer != out.structuralDestabilizer)
      out.discrepancies.push_back("maximal destabilizer differs");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonUnique) throw;
    out.discrepancies.push_back(std::string("brute force: ") + e.what());
  }

  try {
    std::vector<std::vector<int>> brute_steps;
    for (auto t : brute_sigma0_hn_filtration(lat, eta)) brute_steps.push_back(lat.dims(t));
    std::vector<std::vector<int>> structural_steps;
    for (const auto& s : sigma0_hn_filtration(formal).steps) structural_steps.push_back(dims_of_class(s, c.m1, c.length()));
    if (brute_steps != structural_steps) out.discrepancies.push_back("sigma = 0 HN filtration differs");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonUnique) throw;
    out.discrepancies.push_back(std::string("brute force filtration: ") + e.what());
  }

  const BruteVerdict bv = brute_semistable_dim0(lat, eta);
  out.bruteVerdict = bv.kind;
  out.structural = bv.structural;
  if (!bv.agrees) out.discrepancies.push_back("semistability verdict differs from the structural classification");

  EpsilonFamily fam;
  fam.eta = eta;
  fam.delta = Polynomial::constant(delta);
  fam.epsilon = epsilon;
  std::vector<ComplexClass> tests;
  for (std::size_t t = 0; t < lat.size(); ++t)
    if (!lat.is_zero(t) && !lat.is_whole(t)) tests.push_back(class_of_dims(lat.dims(t), c.m1));
  const Verdict ev = is_semistable(formal, to_parameters(fam), tests);
  if (ev.semistable() != (bv.kind != VerdictKind::Destabilized))
    out.discrepancies.push_back("small-epsilon verdict differs from the sigma = 0 verdict on a point");
  return out;
}

}  // namespace hnstrat
