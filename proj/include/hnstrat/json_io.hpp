#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hnstrat/beta.hpp"
#include "hnstrat/oracle.hpp"

namespace hnstrat::io {

using Json = nlohmann::json;

/// Canonical text of a JSON document: sorted keys, two-space indent, trailing newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json parse_text(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
}

inline void require_object(const Json& j, const std::string& what) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, what + " must be an object");
}

inline void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& what) {
  require_object(j, what);
  for (const auto& [k, v] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw Error(ErrorCode::Parse, "unknown field '" + k + "' in " + what);
}

inline const Json& field(const Json& j, const std::string& key, const std::string& what) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::Parse, "missing field '" + key + "' in " + what);
  return *it;
}

inline std::int64_t to_int(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) throw Error(ErrorCode::Parse, what + " must be an integer");
  return j.get<std::int64_t>();
}

inline int to_index(const std::string& key, const std::string& what) {
  try {
    return static_cast<int>(to_int64(parse_integer(key)));
  } catch (const Error&) {
    throw Error(ErrorCode::Parse, "bad index '" + key + "' in " + what);
  }
}

// ---------------------------------------------------------------------------
// Scalars and polynomials

inline Json to_json(const Rational& q) { return to_string(q); }

inline Rational rational_from(const Json& j, const std::string& what) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  throw Error(ErrorCode::Parse, what + " must be a rational string");
}

inline Json to_json(const Polynomial& p) {
  Json out = Json::array();
  for (const auto& c : p.coefficients()) out.push_back(to_string(c));
  return out;
}

inline Polynomial polynomial_from(const Json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorCode::Parse, what + " must be an array of coefficients");
  std::vector<Rational> c;
  for (const auto& e : j) c.push_back(rational_from(e, what));
  return Polynomial(std::move(c));
}

// ---------------------------------------------------------------------------
// Sheaves and complexes

inline Json to_json(const SheafClass& s) {
  if (s.is_zero()) return nullptr;
  return Json{{"rank", s.rank}, {"hilbert", to_json(s.hilbert)}};
}

inline SheafClass sheaf_from(const Json& j, const std::string& what) {
  if (j.is_null()) return {};
  check_keys(j, {"rank", "hilbert"}, what);
  return {to_int(field(j, "rank", what), what + ".rank"), polynomial_from(field(j, "hilbert", what), what + ".hilbert")};
}

inline Json to_json(const ComplexClass& c) {
  Json out = Json::object();
  for (const auto& [i, s] : c.pieces()) out[std::to_string(i)] = to_json(s);
  return out;
}

inline ComplexClass complex_class_from(const Json& j, const std::string& what) {
  require_object(j, what);
  ComplexClass out;
  for (const auto& [k, v] : j.items()) out.set(to_index(k, what), sheaf_from(v, what + "." + k));
  return out;
}

inline Json to_json(const std::vector<SheafClass>& list) {
  Json out = Json::array();
  for (const auto& s : list) out.push_back(to_json(s));
  return out;
}

inline std::vector<SheafClass> sheaf_list_from(const Json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorCode::Parse, what + " must be an array of sheaves");
  std::vector<SheafClass> out;
  for (const auto& e : j) {
    if (e.is_null()) throw Error(ErrorCode::Parse, what + " contains a zero sheaf");
    out.push_back(sheaf_from(e, what));
  }
  return out;
}

inline Json to_json(const FormalComplex& c) {
  Json out;
  out["dimX"] = c.config.dimX;
  out["degX"] = to_json(c.config.degX);
  out["m1"] = c.m1;
  out["m2"] = c.m2;
  Json terms = Json::object();
  for (int i = c.m1; i <= c.m2; ++i) terms[std::to_string(i)] = to_json(c.term(i));
  out["terms"] = terms;
  Json images = Json::object();
  for (int i = c.m1; i < c.m2; ++i) images[std::to_string(i)] = to_json(c.image(i));
  out["images"] = images;
  Json h = Json::object();
  for (const auto& [i, l] : c.cohomologyHN) h[std::to_string(i)] = to_json(l);
  out["cohomologyHN"] = h;
  Json im = Json::object();
  for (const auto& [i, l] : c.imageHN) im[std::to_string(i)] = to_json(l);
  out["imageHN"] = im;
  return out;
}

inline FormalComplex complex_from(const Json& j) {
  const std::string what = "complex";
  check_keys(j, {"dimX", "degX", "m1", "m2", "terms", "images", "cohomologyHN", "imageHN"}, what);
  FormalComplex c;
  c.config.dimX = static_cast<int>(to_int(field(j, "dimX", what), "dimX"));
  c.config.degX = rational_from(field(j, "degX", what), "degX");
  c.m1 = static_cast<int>(to_int(field(j, "m1", what), "m1"));
  c.m2 = static_cast<int>(to_int(field(j, "m2", what), "m2"));
  const auto read_map = [&](const char* key, std::map<int, SheafClass>& dst) {
    auto it = j.find(key);
    if (it == j.end()) return;
    require_object(*it, key);
    for (const auto& [k, v] : it->items()) {
      const int i = to_index(k, key);
      const SheafClass s = sheaf_from(v, std::string(key) + "." + k);
      if (!s.is_zero()) dst[i] = s;
    }
  };
  const auto read_hn = [&](const char* key, std::map<int, std::vector<SheafClass>>& dst) {
    auto it = j.find(key);
    if (it == j.end()) return;
    require_object(*it, key);
    for (const auto& [k, v] : it->items()) dst[to_index(k, key)] = sheaf_list_from(v, std::string(key) + "." + k);
  };
  field(j, "terms", what);
  read_map("terms", c.terms);
  read_map("images", c.images);
  read_hn("cohomologyHN", c.cohomologyHN);
  read_hn("imageHN", c.imageHN);
  return c;
}

// ---------------------------------------------------------------------------
// Parameters

struct ParamsFile {
  StabilityParameters params;
  std::optional<Rational> epsilon;

  [[nodiscard]] EpsilonFamily family(std::optional<Rational> override_epsilon = std::nullopt) const {
    EpsilonFamily f;
    f.eta = params.eta;
    f.delta = params.delta;
    if (override_epsilon) f.epsilon = *override_epsilon;
    else if (epsilon) f.epsilon = *epsilon;
    else throw Error(ErrorCode::InvalidInput, "epsilon is required (params file or --epsilon)");
    return f;
  }
};

inline Json to_json(const ParamsFile& p) {
  Json out;
  if (!p.params.sigma.empty()) {
    Json s = Json::object();
    for (const auto& [i, v] : p.params.sigma) s[std::to_string(i)] = v.convert_to<std::int64_t>();
    out["sigma"] = s;
  }
  Json eta = Json::object();
  for (const auto& [i, v] : p.params.eta) eta[std::to_string(i)] = to_json(v);
  out["eta"] = eta;
  out["delta"] = to_json(p.params.delta);
  if (p.epsilon) out["epsilon"] = to_json(*p.epsilon);
  return out;
}

inline ParamsFile params_from(const Json& j) {
  const std::string what = "params";
  check_keys(j, {"sigma", "eta", "delta", "epsilon"}, what);
  ParamsFile out;
  if (auto it = j.find("sigma"); it != j.end()) {
    require_object(*it, "sigma");
    for (const auto& [k, v] : it->items()) out.params.sigma[to_index(k, "sigma")] = Integer(to_int(v, "sigma." + k));
  }
  const Json& eta = field(j, "eta", what);
  require_object(eta, "eta");
  for (const auto& [k, v] : eta.items()) out.params.eta[to_index(k, "eta")] = rational_from(v, "eta." + k);
  out.params.delta = polynomial_from(field(j, "delta", what), "delta");
  if (auto it = j.find("epsilon"); it != j.end()) out.epsilon = rational_from(*it, "epsilon");
  return out;
}

// ---------------------------------------------------------------------------
// One-parameter subgroups

struct OnePSFile {
  OneParameterSubgroup lambda;
  std::optional<InducedFiltrationData> filtration;
};

inline Json to_json(const std::map<int, std::vector<std::int64_t>>& m) {
  Json out = Json::object();
  for (const auto& [i, v] : m) out[std::to_string(i)] = v;
  return out;
}

inline std::map<int, std::vector<std::int64_t>> int_table_from(const Json& j, const std::string& what) {
  require_object(j, what);
  std::map<int, std::vector<std::int64_t>> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_array()) throw Error(ErrorCode::Parse, what + "." + k + " must be an array");
    auto& row = out[to_index(k, what)];
    for (const auto& e : v) row.push_back(to_int(e, what + "." + k));
  }
  return out;
}

inline Json to_json(const OnePSFile& f) {
  Json out;
  Json w = Json::array();
  for (const auto& k : f.lambda.weights) w.push_back(to_json(k));
  out["weights"] = w;
  out["blocks"] = to_json(f.lambda.blocks);
  if (f.filtration) {
    out["ranks"] = to_json(f.filtration->quotientRanks);
    out["compatible"] = f.filtration->compatible;
    if (f.filtration->crossing) out["crossing"] = f.filtration->crossing->convert_to<std::int64_t>();
  }
  return out;
}

inline OnePSFile one_ps_from(const Json& j) {
  const std::string what = "1-PS";
  check_keys(j, {"weights", "blocks", "ranks", "compatible", "crossing"}, what);
  OnePSFile out;
  const Json& w = field(j, "weights", what);
  if (!w.is_array()) throw Error(ErrorCode::Parse, "weights must be an array");
  for (const auto& e : w) out.lambda.weights.push_back(rational_from(e, "weights"));
  out.lambda.blocks = int_table_from(field(j, "blocks", what), "blocks");
  if (j.contains("ranks")) {
    InducedFiltrationData d;
    d.quotientRanks = int_table_from(j["ranks"], "ranks");
    if (auto it = j.find("compatible"); it != j.end()) {
      if (!it->is_boolean()) throw Error(ErrorCode::Parse, "compatible must be a boolean");
      d.compatible = it->get<bool>();
    }
    if (auto it = j.find("crossing"); it != j.end()) d.crossing = Integer(to_int(*it, "crossing"));
    out.filtration = d;
  } else if (j.contains("compatible") || j.contains("crossing")) {
    throw Error(ErrorCode::Parse, "compatible/crossing given without ranks");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite complexes

inline Json to_json(const FiniteComplex& c) {
  Json out;
  out["p"] = c.p;
  out["m1"] = c.m1;
  out["dims"] = c.dims;
  Json maps = Json::array();
  for (const auto& m : c.maps) maps.push_back(m.data);
  out["maps"] = maps;
  return out;
}

inline FiniteComplex finite_complex_from(const Json& j) {
  const std::string what = "finite complex";
  check_keys(j, {"p", "m1", "dims", "maps"}, what);
  FiniteComplex c;
  c.p = static_cast<int>(to_int(field(j, "p", what), "p"));
  c.m1 = j.contains("m1") ? static_cast<int>(to_int(j["m1"], "m1")) : 0;
  const Json& dims = field(j, "dims", what);
  if (!dims.is_array()) throw Error(ErrorCode::Parse, "dims must be an array");
  for (const auto& d : dims) c.dims.push_back(static_cast<int>(to_int(d, "dims")));
  const Json& maps = field(j, "maps", what);
  if (!maps.is_array()) throw Error(ErrorCode::Parse, "maps must be an array");
  std::size_t k = 0;
  for (const auto& m : maps) {
    if (!m.is_array()) throw Error(ErrorCode::Parse, "each map must be a row-major array");
    if (k + 1 >= c.dims.size()) throw Error(ErrorCode::Parse, "more maps than positions allow");
    gf::Matrix M(c.dims[k + 1], c.dims[k]);
    if (m.size() != M.data.size()) throw Error(ErrorCode::Parse, "map " + std::to_string(k) + " has the wrong size");
    for (std::size_t e = 0; e < m.size(); ++e) M.data[e] = static_cast<int>(to_int(m[e], "maps"));
    c.maps.push_back(std::move(M));
    ++k;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const LabeledPiece& p) { return Json{{"label", to_string(p.label)}, {"piece", to_json(p.piece)}}; }

inline Json to_json(const HNFiltration& f) {
  Json out = Json::array();
  for (std::size_t k = 0; k < f.steps.size(); ++k)
    out.push_back({{"step", to_json(f.steps[k])},
                   {"label", to_string(f.quotients[k].label)},
                   {"quotient", to_json(f.quotients[k].piece)}});
  return out;
}

inline Json to_json(const HNType& t) {
  Json out = Json::array();
  for (const auto& e : t.entries) {
    Json h = Json::object();
    for (const auto& [i, s] : e.piece.pieces()) h[std::to_string(i)] = to_json(s.hilbert);
    out.push_back({{"label", to_string(e.label)}, {"hilbert", h}});
  }
  return out;
}

inline Json to_json(const Verdict& v) {
  Json out;
  out["verdict"] = to_string(v.kind);
  out["witness"] = v.witness ? to_json(*v.witness) : Json(nullptr);
  return out;
}

inline Json to_json(const Epsilon0Result& r) {
  Json out;
  out["epsilon0"] = to_string(r.bound);
  Json per = Json::object();
  for (const auto& [i, t] : r.perIndex)
    per[std::to_string(i)] = {{"M", t.M ? to_json(*t.M) : Json(nullptr)}, {"constraintActive", t.active}};
  out["perIndex"] = per;
  Json cons = Json::array();
  for (const auto& c : r.constraints)
    cons.push_back({{"upper", to_string(c.upper)}, {"lower", to_string(c.lower)}, {"threshold", to_json(c.threshold)}});
  out["constraints"] = cons;
  return out;
}

inline Json chain_json(const std::vector<Polynomial>& chain) {
  Json out = Json::array();
  for (const auto& p : chain) out.push_back(to_json(p));
  return out;
}

inline Json to_json(const Sigma0Class& s) {
  Json out{{"shape", to_string(s.shape)}, {"reason", to_string(s.reason)}};
  out["position"] = s.shape == Sigma0Shape::Neither ? Json(nullptr) : Json(s.position);
  return out;
}

inline Json to_json(const SmallEpsilonClass& s) {
  return Json{{"shape", to_string(s.shape)}, {"reason", to_string(s.reason)}};
}

inline Json key_map_json(const std::map<BlockKey, Rational>& m) {
  Json out = Json::object();
  for (const auto& [k, v] : m) out[to_string(k)] = to_json(v);
  return out;
}

inline Json to_json(const StratumCertificate& c) {
  Json out;
  out["tau"] = to_json(c.tau);
  out["chain"] = chain_json(c.chain);
  out["epsilon0"] = to_string(c.epsilon0);
  out["n"] = c.n;
  out["status"] = c.status;
  out["detail"] = c.detail;
  out["coneAssumption"] = c.coneAssumption;
  out["a"] = c.ab ? key_map_json(c.ab->a) : Json::object();
  out["b"] = c.ab ? key_map_json(c.ab->b) : Json::object();
  out["ordering"] = !c.ab ? Json("unavailable")
                    : c.orderingViolation ? Json("violation after " + to_string(c.tau.entries[*c.orderingViolation].label))
                                          : Json("ok");
  out["minN"] = c.minN ? Json(*c.minN) : Json(nullptr);
  Json graded = Json::array();
  for (const auto& g : c.graded) graded.push_back({{"label", to_string(g.label)}, {"classification", to_json(g.classification)}});
  out["gradedPieces"] = graded;
  out["sumZero"] = c.sumZero;
  if (c.beta) {
    Json blocks = Json::array();
    for (const auto& b : c.beta->beta.blocks)
      blocks.push_back({{"label", to_string(b.label)},
                        {"slot", b.slot},
                        {"weight", to_json(b.weight)},
                        {"multiplicity", b.multiplicity.convert_to<std::int64_t>()}});
    out["beta"] = blocks;
    out["normSquared"] = to_json(c.beta->beta.normSquared);
    Json lambda = Json::array();
    for (const auto& w : c.beta->integral.weights) lambda.push_back(to_json(w));
    out["lambda"] = {{"weights", lambda},
                     {"blocks", to_json(c.beta->integral.blocks)},
                     {"scale", c.beta->scale.convert_to<std::int64_t>()},
                     {"check", c.beta->trivial ? Json("trivial") : c.beta->check.ok() ? Json("ok") : Json(c.beta->check.problems)}};
  } else {
    out["beta"] = Json::array();
    out["normSquared"] = nullptr;
    out["lambda"] = nullptr;
  }
  out["weightIdentity"] = !c.identity ? Json("unavailable") : c.identity->verified ? Json("verified") : Json("mismatch");
  if (c.identity) {
    out["minusMu"] = to_json(c.identity->minusMu);
  } else {
    out["minusMu"] = nullptr;
  }
  Json chi = Json::object();
  for (const auto& [l, v] : c.chiF) chi[(l.kind == PieceKind::Cohomology ? "u" : "w") + to_string(block_key(l))] = to_json(v);
  out["chiF"] = chi;
  return out;
}

inline Json to_json(const MuReport& r) {
  Json coef = Json::object();
  for (const auto& [i, v] : r.coefficients) coef[std::to_string(i)] = to_json(v);
  return Json{{"coefficients", coef}, {"mu", to_json(r.total)}};
}

inline Json to_json(const LinearizationData& d) {
  Json a = Json::object();
  Json c = Json::object();
  for (const auto& [i, v] : d.a) a[std::to_string(i)] = to_json(v);
  for (const auto& [i, v] : d.c) c[std::to_string(i)] = to_json(v);
  return Json{{"a", a}, {"c", c}, {"positivityOK", d.positivityOK}};
}

inline Json to_json(const CrossValidation& v) {
  return Json{{"discrepancies", v.discrepancies},
              {"subcomplexes", v.subcomplexes},
              {"bruteDestabilizer", v.bruteDestabilizer},
              {"structuralDestabilizer", v.structuralDestabilizer},
              {"bruteVerdict", to_string(v.bruteVerdict)},
              {"structural", to_json(v.structural)}};
}

}  // namespace hnstrat::io
