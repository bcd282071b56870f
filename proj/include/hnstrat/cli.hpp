#pragma once

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "hnstrat/json_io.hpp"
#include "hnstrat/version.hpp"

namespace hnstrat::cli {

using io::Json;

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::InvalidInput, "sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

struct Input {
  Json json;
  std::string sha256;
};

inline Input read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  return {io::parse_text(text), sha256_hex(text)};
}

struct RunConfig {
  std::string complexPath;
  std::string secondPath;
  std::string paramsPath;
  std::string outPath;
  std::optional<int> n;
  std::string epsilon;
  std::optional<std::int64_t> budget;
  std::string format = "json";
  bool forceSigma0 = false;
  bool assumeCone = false;
};

class Runner {
 public:
  Runner(const RunConfig& cfg, std::ostream& out, std::ostream& err) : cfg_(cfg), out_(out), err_(err) {}

  int check_ss() {
    const FormalComplex c = load_complex();
    const io::ParamsFile params = load_params();
    const auto eps = epsilon_override();
    const bool family = eps || params.epsilon;
    const StabilityParameters p = family ? to_parameters(params.family(eps)) : params.params;
    const auto tests = structural_test_family(c);
    const Verdict v = is_semistable(c, p, tests);
    Json r = io::to_json(v);
    r["command"] = "check-ss";
    r["parameters"] = family ? "epsilon-family" : "sigma-chi";
    r["testObjects"] = tests.size();
    r["reducedComplex"] = io::to_json(reduced_hilbert(c, p));
    r["reducedWitness"] = v.witness ? io::to_json(reduced_hilbert(*v.witness, p)) : Json(nullptr);
    emit(r);
    return v.semistable() ? 0 : 1;
  }

  int hn() {
    const FormalComplex c = load_complex();
    const io::ParamsFile params = load_params();
    Json r;
    r["command"] = "hn";
    r["sigma0_filtration"] = io::to_json(sigma0_hn_filtration(c));
    r["coneAssumption"] = cfg_.assumeCone;
    if (cfg_.forceSigma0) {
      r["refined"] = nullptr;
      r["chain"] = nullptr;
      r["epsilon0"] = nullptr;
      emit(r);
      return 0;
    }
    const EpsilonFamily f = params.family(epsilon_override());
    RefinedHN refined;
    try {
      refined = refined_hn_filtration(c, f);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EpsilonTooLarge) throw;
      err_ << e.what() << "\n";
      return 1;
    }
    r["epsilon"] = io::to_json(f.epsilon);
    r["epsilon0"] = to_string(refined.threshold.bound);
    r["refined"] = {{"steps", io::to_json(refined.filtration)}, {"type", io::to_json(refined.type)}};
    r["chain"] = io::chain_json(refined.chain);
    emit(r);
    return 0;
  }

  int epsilon0() {
    const FormalComplex c = load_complex();
    const io::ParamsFile params = load_params();
    EpsilonFamily f;
    f.eta = params.params.eta;
    f.delta = params.params.delta;
    Json r = io::to_json(epsilon_threshold(c, f));
    r["command"] = "epsilon0";
    emit(r);
    return 0;
  }

  int beta() {
    const FormalComplex c = load_complex();
    const io::ParamsFile params = load_params();
    const EpsilonFamily f = params.family(epsilon_override());
    const StratumCertificate cert = certify_membership(c, f, require_n(), cfg_.assumeCone);
    Json r = io::to_json(cert);
    r["command"] = "beta";
    r["epsilon"] = io::to_json(f.epsilon);
    emit(r);
    return cert.flagged() ? 1 : 0;
  }

  int mu() {
    const FormalComplex c = load_complex();
    const io::ParamsFile params = load_params();
    const Input lam = read(cfg_.secondPath);
    const io::OnePSFile ps = io::one_ps_from(lam.json);
    if (!ps.filtration) throw Error(ErrorCode::InvalidInput, "1-PS file has no quotient ranks");
    const int n = require_n();
    const auto eps = epsilon_override();
    const bool family = eps || params.epsilon;
    const StabilityParameters p = family ? epsilon_instantiation(params.family(eps), c.whole())
                                         : normalize_eta(params.params, c);
    const MuReport m = hnstrat::mu(ps.lambda, *ps.filtration, c.whole(), p, n);
    std::map<int, std::int64_t> dims;
    for (int i = c.m1; i <= c.m2; ++i) {
      const Rational v = c.term(i).hilbert(n);
      if (!is_integer(v)) throw Error(ErrorCode::InvalidInput, "P^" + std::to_string(i) + "(n) is not an integer");
      dims[i] = to_int64(numerator_of(v));
    }
    const OnePSReport check = check_1ps(ps.lambda, p.sigma, dims);
    Json r = io::to_json(m);
    r["command"] = "mu";
    r["n"] = n;
    r["case"] = ps.filtration->compatible ? "subcomplex" : "noncompatible";
    r["onePSCheck"] = check.ok() ? Json("ok") : Json(check.problems);
    r["parameters"] = family ? "epsilon-family" : "sigma-chi";
    emit(r);
    return 0;
  }

  int linearize() {
    const FormalComplex c = load_complex();
    const io::ParamsFile params = load_params();
    const LinearizationData d = linearization_data(c, params.params, require_n());
    Json r = io::to_json(d);
    r["command"] = "linearize";
    r["n"] = require_n();
    emit(r);
    return 0;
  }

  int oracle() {
    Json spec = Json::object();
    if (!cfg_.complexPath.empty()) spec = read(cfg_.complexPath).json;
    io::check_keys(spec,
                   {"p", "maxPositions", "maxDim", "eta", "epsilon", "delta", "samples", "samplePositions",
                    "sampleMaxDim", "seed", "checkLimits"},
                   "sweep spec");
    const auto get_int = [&](const char* key, std::int64_t dflt) {
      return spec.contains(key) ? io::to_int(spec[key], key) : dflt;
    };
    const int p = static_cast<int>(get_int("p", 2));
    const int max_positions = static_cast<int>(get_int("maxPositions", 2));
    const int max_dim = static_cast<int>(get_int("maxDim", 2));
    const auto samples = get_int("samples", 0);
    const int sample_positions = static_cast<int>(get_int("samplePositions", 3));
    const int sample_max_dim = static_cast<int>(get_int("sampleMaxDim", 3));
    const auto seed = get_int("seed", 1);
    const bool check_lim = spec.contains("checkLimits") ? spec["checkLimits"].get<bool>() : false;
    const Rational epsilon = spec.contains("epsilon") ? io::rational_from(spec["epsilon"], "epsilon") : Rational(1, 10);
    const Rational delta = spec.contains("delta") ? io::rational_from(spec["delta"], "delta") : Rational(1);
    std::map<int, Rational> eta;
    const int positions = std::max(max_positions, samples > 0 ? sample_positions : 0);
    if (spec.contains("eta")) {
      int k = 0;
      for (const auto& e : spec["eta"]) eta[k++] = io::rational_from(e, "eta");
    }
    for (int k = 0; k < positions; ++k)
      if (!eta.contains(k)) eta[k] = k;
    const std::int64_t budget = cfg_.budget ? *cfg_.budget : default_budget();

    std::vector<FiniteComplex> sweep = all_finite_complexes(p, max_positions, max_dim);
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::uniform_int_distribution<int> len(1, std::max(1, sample_positions));
    for (std::int64_t s = 0; s < samples; ++s) sweep.push_back(random_finite_complex(rng, p, len(rng), sample_max_dim));

    std::size_t discrepancies = 0;
    std::size_t limit_checks = 0;
    std::ostringstream lines;
    for (const auto& fc : sweep) {
      const CrossValidation v = cross_validate(fc, eta, epsilon, delta, budget);
      Json line = io::to_json(v);
      line["complex"] = io::to_json(fc);
      std::size_t count = v.discrepancies.size();
      if (check_lim) {
        const LimitSweep ls = check_limits(fc, {-1, 0, 1});
        line["limitDecompositions"] = ls.decompositions;
        line["limitDiscrepancies"] = ls.discrepancies;
        limit_checks += ls.decompositions;
        count += ls.discrepancies.size();
      }
      discrepancies += count;
      lines << line.dump() << "\n";
    }
    Json summary{{"summary",
                  {{"complexes", sweep.size()},
                   {"discrepancies", discrepancies},
                   {"limitDecompositions", limit_checks},
                   {"inputSha256", hashes_},
                   {"version", std::string(kVersion)}}}};
    lines << summary.dump() << "\n";
    write(lines.str());
    return discrepancies == 0 ? 0 : 1;
  }

 private:
  Input read(const std::string& path) {
    Input in = read_input(path);
    hashes_.push_back(in.sha256);
    return in;
  }

  FormalComplex load_complex() {
    const FormalComplex c = io::complex_from(read(cfg_.complexPath).json);
    const auto problems = validate_complex(c);
    if (!problems.empty()) {
      std::string msg = "invalid complex:";
      for (const auto& p : problems) msg += "\n  " + p;
      throw Error(ErrorCode::InvalidInput, msg);
    }
    return c;
  }

  io::ParamsFile load_params() {
    if (cfg_.paramsPath.empty()) throw Error(ErrorCode::InvalidInput, "--params is required");
    return io::params_from(read(cfg_.paramsPath).json);
  }

  std::optional<Rational> epsilon_override() const {
    if (cfg_.epsilon.empty()) return std::nullopt;
    return parse_rational(cfg_.epsilon);
  }

  int require_n() const {
    if (!cfg_.n) throw Error(ErrorCode::InvalidInput, "--n is required");
    return *cfg_.n;
  }

  void emit(Json report) {
    report["inputSha256"] = hashes_;
    report["version"] = std::string(kVersion);
    if (cfg_.format == "table") {
      std::ostringstream os;
      for (const auto& [k, v] : report.items()) os << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
      write(os.str());
    } else {
      write(io::dump(report));
    }
  }

  void write(const std::string& text) {
    if (cfg_.outPath.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(cfg_.outPath, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidInput, "cannot write " + cfg_.outPath);
    f << text;
  }

  RunConfig cfg_;
  std::ostream& out_;
  std::ostream& err_;
  std::vector<std::string> hashes_;
};

/// Exit codes: 0 success (semistable for check-ss), 1 negative outcome
/// (destabilized, epsilon too large, flagged certificate, oracle discrepancy), 2 error.
inline int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semistability, HN filtrations and stratification indices for formal complexes of sheaves", "hnstrat"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  RunConfig cfg;

  const auto common = [&](CLI::App* sub, bool complex_required) {
    auto* opt = sub->add_option("complex", cfg.complexPath, "complex JSON file");
    if (complex_required) opt->required();
    sub->add_option("--params", cfg.paramsPath, "parameters JSON file");
    sub->add_option("--n", cfg.n, "twist n");
    sub->add_option("--epsilon", cfg.epsilon, "epsilon as p/q, overrides the params file");
    sub->add_option("--budget", cfg.budget, "subcomplex enumeration budget");
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "table"}));
    sub->add_option("--out", cfg.outPath, "write the report to this file");
  };

  auto* check_ss = app.add_subcommand("check-ss", "semistability verdict over the structural test family");
  common(check_ss, true);
  auto* hn = app.add_subcommand("hn", "sigma = 0 and refined HN filtrations");
  common(hn, true);
  hn->add_flag("--force-sigma0", cfg.forceSigma0, "only the sigma = 0 filtration, regardless of epsilon");
  hn->add_flag("--assume-cone-classification", cfg.assumeCone, "record the cone classification assumption");
  auto* eps0 = app.add_subcommand("epsilon0", "small-epsilon threshold");
  common(eps0, true);
  auto* beta = app.add_subcommand("beta", "stratum certificate at twist n");
  common(beta, true);
  beta->add_flag("--assume-cone-classification", cfg.assumeCone, "record the cone classification assumption");
  auto* mu = app.add_subcommand("mu", "Hilbert-Mumford weight of a 1-PS");
  common(mu, true);
  mu->add_option("onePS", cfg.secondPath, "1-PS JSON file")->required();
  auto* lin = app.add_subcommand("linearize", "linearization constants a_i, c_i");
  common(lin, true);
  auto* oracle = app.add_subcommand("oracle", "finite-field brute-force sweep");
  common(oracle, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Runner runner(cfg, out, err);
  try {
    if (*check_ss) return runner.check_ss();
    if (*hn) return runner.hn();
    if (*eps0) return runner.epsilon0();
    if (*beta) return runner.beta();
    if (*mu) return runner.mu();
    if (*lin) return runner.linearize();
    if (*oracle) return runner.oracle();
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace hnstrat::cli
