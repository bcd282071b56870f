#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "hnstrat/cli.hpp"
#include "support/generators.hpp"

using namespace hnstrat;
using hnstrat::testing::fixture_path;
using hnstrat::testing::Gen;
using hnstrat::testing::read_file;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "hnstrat");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fx(const char* name) { return fixture_path(name); }

}  // namespace

TEST(Json, ComplexFixturesRoundTrip) {
  for (const char* name : {"c1.json", "sheaf_semistable.json", "sheaf_unstable.json", "cone.json", "invalid_rank.json"}) {
    const std::string text = read_file(fx(name));
    EXPECT_EQ(io::dump(io::to_json(io::complex_from(io::parse_text(text)))), text) << name;
  }
}

TEST(Json, OtherFixturesRoundTrip) {
  const std::string params = read_file(fx("setup_a.json"));
  EXPECT_EQ(io::dump(io::to_json(io::params_from(io::parse_text(params)))), params);
  for (const char* name : {"one_ps_c1.json", "one_ps_c1_crossing.json"}) {
    const std::string text = read_file(fx(name));
    EXPECT_EQ(io::dump(io::to_json(io::one_ps_from(io::parse_text(text)))), text) << name;
  }
  const std::string fin = read_file(fx("finite_d10.json"));
  EXPECT_EQ(io::dump(io::to_json(io::finite_complex_from(io::parse_text(fin)))), fin);
}

TEST(Json, C1Parsed) {
  const FormalComplex c = io::complex_from(io::parse_text(read_file(fx("c1.json"))));
  EXPECT_EQ(c, hnstrat::testing::c1());
  const auto p = io::params_from(io::parse_text(read_file(fx("setup_a.json"))));
  EXPECT_EQ(p.family(), hnstrat::testing::setup_a());
}

TEST(Json, RandomComplexesRoundTrip) {
  Gen g(81);
  for (int t = 0; t < 200; ++t) {
    const FormalComplex c = g.complex(g.uniform(1, 2));
    const std::string text = io::dump(io::to_json(c));
    const FormalComplex back = io::complex_from(io::parse_text(text));
    EXPECT_EQ(back, c);
    EXPECT_EQ(io::dump(io::to_json(back)), text);
  }
}

TEST(Json, Rejections) {
  const auto code = [](const std::string& text) {
    try {
      io::complex_from(io::parse_text(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Discrepancy;
  };
  EXPECT_EQ(code(read_file(fx("malformed.txt"))), ErrorCode::Parse);
  EXPECT_EQ(code(R"({"dimX":1,"degX":"1","m1":0,"m2":0,"terms":{},"extra":1})"), ErrorCode::Parse);
  EXPECT_EQ(code(R"({"dimX":1,"degX":"1","m1":0,"m2":0})"), ErrorCode::Parse);
  EXPECT_EQ(code(R"({"dimX":1,"degX":"1/0","m1":0,"m2":0,"terms":{}})"), ErrorCode::Parse);
  EXPECT_EQ(code(R"({"dimX":1,"degX":1.5,"m1":0,"m2":0,"terms":{}})"), ErrorCode::Parse);
  EXPECT_EQ(code(R"({"dimX":1,"degX":"1","m1":0,"m2":0,"terms":{"0":{"rank":1}}})"), ErrorCode::Parse);
  EXPECT_EQ(code(R"({"dimX":1,"degX":"1","m1":0,"m2":0,"terms":{"a":null}})"), ErrorCode::Parse);
}

TEST(Cli, CheckSS) {
  const CliRun check = run({"check-ss", fx("c1.json"), "--params", fx("setup_a.json")});
  EXPECT_EQ(check.code, 1);
  const io::Json j = io::parse_text(check.out);
  EXPECT_EQ(j["verdict"], to_string(VerdictKind::Destabilized));
  EXPECT_FALSE(j["witness"].is_null());
  EXPECT_EQ(run({"check-ss", fx("sheaf_semistable.json"), "--params", fx("setup_a.json")}).code, 0);
  EXPECT_EQ(run({"check-ss", fx("sheaf_unstable.json"), "--params", fx("setup_a.json")}).code, 1);
  EXPECT_EQ(run({"check-ss", fx("cone.json"), "--params", fx("setup_a.json")}).code, 0);
  EXPECT_EQ(run({"check-ss", fx("malformed.txt"), "--params", fx("setup_a.json")}).code, 2);
  EXPECT_EQ(run({"check-ss", fx("invalid_rank.json"), "--params", fx("setup_a.json")}).code, 2);
  EXPECT_EQ(run({"check-ss", fx("missing.json"), "--params", fx("setup_a.json")}).code, 2);
  EXPECT_EQ(run({"check-ss"}).code, 2);
  EXPECT_EQ(run({"no-such-command"}).code, 2);
}

TEST(Cli, HN) {
  const CliRun ok = run({"hn", fx("c1.json"), "--params", fx("setup_a.json")});
  EXPECT_EQ(ok.code, 0);
  const io::Json j = io::parse_text(ok.out);
  EXPECT_EQ(j["epsilon0"], "1/2");
  const CliRun big = run({"hn", fx("c1.json"), "--params", fx("setup_a.json"), "--epsilon", "1"});
  EXPECT_EQ(big.code, 1);
  EXPECT_NE(big.err.find("epsilon >= bound 1/2"), std::string::npos);
  EXPECT_EQ(run({"hn", fx("c1.json"), "--params", fx("setup_a.json"), "--epsilon", "1", "--force-sigma0"}).code, 0);
  EXPECT_EQ(run({"hn", fx("c1.json"), "--params", fx("setup_a.json"), "--epsilon", "x"}).code, 2);
}

TEST(Cli, OtherCommands) {
  const std::string params = fx("setup_a.json");
  EXPECT_EQ(run({"epsilon0", fx("c1.json"), "--params", params}).code, 0);
  const CliRun beta = run({"beta", fx("c1.json"), "--params", params, "--n", "10"});
  EXPECT_EQ(beta.code, 0);
  EXPECT_NE(beta.out.find("\"685/192\""), std::string::npos);
  const CliRun mu = run({"mu", fx("c1.json"), fx("one_ps_c1.json"), "--params", params, "--n", "10"});
  EXPECT_EQ(mu.code, 0);
  EXPECT_NE(mu.out.find("\"-855/4\""), std::string::npos);
  const CliRun mu2 = run({"mu", fx("c1.json"), fx("one_ps_c1_crossing.json"), "--params", params, "--n", "10"});
  EXPECT_NE(mu2.out.find("\"-851/4\""), std::string::npos);
  const CliRun lin = run({"linearize", fx("c1.json"), "--params", params, "--n", "10"});
  EXPECT_EQ(lin.code, 0);
  EXPECT_NE(lin.out.find("\"41/4\""), std::string::npos);
  EXPECT_EQ(run({"oracle", fx("sweep_small.json")}).code, 0);
  EXPECT_EQ(run({"beta", fx("c1.json"), "--params", params}).code, 2);
}

TEST(Cli, ReportsAreDeterministicAndCanonical) {
  const std::string params = fx("setup_a.json");
  const std::vector<std::vector<std::string>> cmds{
      {"check-ss", fx("c1.json"), "--params", params},
      {"hn", fx("c1.json"), "--params", params},
      {"epsilon0", fx("c1.json"), "--params", params},
      {"beta", fx("c1.json"), "--params", params, "--n", "10"},
      {"mu", fx("c1.json"), fx("one_ps_c1.json"), "--params", params, "--n", "10"},
      {"linearize", fx("c1.json"), "--params", params, "--n", "10"},
  };
  for (const auto& cmd : cmds) {
    const CliRun a = run(cmd);
    const CliRun b = run(cmd);
    EXPECT_EQ(a.out, b.out) << cmd[0];
    EXPECT_EQ(io::dump(io::parse_text(a.out)), a.out) << cmd[0];
    const io::Json j = io::parse_text(a.out);
    EXPECT_EQ(j["version"], kVersion);
    EXPECT_TRUE(j["inputSha256"].is_array());
  }
}

TEST(Cli, OutFileAndTable) {
  const auto path = std::filesystem::temp_directory_path() / "hnstrat_cli_test_report.json";
  const CliRun r = run({"hn", fx("c1.json"), "--params", fx("setup_a.json"), "--out", path.string()});
  EXPECT_EQ(r.code, 0);
  const std::string written = read_file(path.string());
  EXPECT_EQ(io::dump(io::parse_text(written)), written);
  std::filesystem::remove(path);
  const CliRun t = run({"hn", fx("c1.json"), "--params", fx("setup_a.json"), "--format", "table"});
  EXPECT_EQ(t.code, 0);
  EXPECT_NE(t.out.find("epsilon0: 1/2\n"), std::string::npos);
}

TEST(Cli, Sha256) {
  EXPECT_EQ(cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
