#include <gtest/gtest.h>

#include "support/generators.hpp"

using namespace hnstrat;
using hnstrat::testing::c1;
using hnstrat::testing::Gen;
using hnstrat::testing::q;
using hnstrat::testing::setup_a;
using hnstrat::testing::sheaf1;

namespace {

ComplexClass cone_piece() {
  ComplexClass c = ComplexClass::at(0, sheaf1(1, 1));
  c.set(1, sheaf1(1, 1));
  return c;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Discrepancy;
}

}  // namespace

TEST(ReducedHilbert, SetupAPieces) {
  const StabilityParameters p = to_parameters(setup_a());
  EXPECT_EQ(reduced_hilbert(ComplexClass::at(0, sheaf1(1, 1)), p), (Polynomial{1, 1}));
  EXPECT_EQ(reduced_hilbert(cone_piece(), p), (Polynomial{-4, 1}));
  EXPECT_EQ(reduced_hilbert(ComplexClass::at(1, sheaf1(1, 2)), p), (Polynomial{-8, 1}));
  EXPECT_EQ(reduced_hilbert(c1(), p), (Polynomial{q("-15/4"), 1}));
}

TEST(ReducedHilbert, DenominatorZero) {
  StabilityParameters p = to_parameters(setup_a());
  p.sigma[0] = 0;
  p.sigma[1] = 0;
  p.sigma_zero_family = true;
  EXPECT_EQ(code_of([&] { (void)reduced_hilbert(c1(), p); }), ErrorCode::DenominatorZero);
}

TEST(NormalizeEta, Examples) {
  const StabilityParameters p = to_parameters(setup_a().with_epsilon(1));
  const auto ranks = ranks_of(c1().whole());
  EXPECT_EQ(normalization_constant(p, ranks), q("1/2"));
  const StabilityParameters n = normalize_eta(p, ranks);
  EXPECT_EQ(n.eta.at(0), q("-1/2"));
  EXPECT_EQ(n.eta.at(1), q("1/2"));
  EXPECT_EQ(normalize_eta(n, ranks), n);
  StabilityParameters flat = p;
  flat.eta = {{0, q("7/3")}, {1, q("7/3")}};
  const StabilityParameters z = normalize_eta(flat, ranks);
  EXPECT_EQ(z.eta.at(0), 0);
  EXPECT_EQ(z.eta.at(1), 0);
}

TEST(IsSemistable, C1DestabilizedByKernel) {
  const FormalComplex c = c1();
  const StabilityParameters p = to_parameters(setup_a());
  const ComplexClass ker = ComplexClass::at(0, sheaf1(1, 1));
  const Verdict v = is_semistable(c, p, {ker});
  EXPECT_EQ(v.kind, VerdictKind::Destabilized);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(*v.witness, ker);
  const Verdict s = is_semistable(c, p, structural_test_family(c));
  EXPECT_EQ(s.kind, VerdictKind::Destabilized);
  EXPECT_EQ(*s.witness, ker);
}

TEST(IsSemistable, SemistableSheafAndVacuous) {
  const FormalComplex c = sheaf_complex(sheaf1(2, 3), 0, {1, 1});
  const StabilityParameters p = to_parameters(setup_a());
  EXPECT_EQ(is_semistable(c, p, structural_test_family(c)).kind, VerdictKind::Semistable);
  EXPECT_EQ(is_semistable(c1(), p, {}).kind, VerdictKind::Semistable);
}

TEST(IsSemistable, InvalidTestObject) {
  const FormalComplex c = c1();
  const StabilityParameters p = to_parameters(setup_a());
  EXPECT_EQ(code_of([&] { is_semistable(c, p, {ComplexClass::at(0, sheaf1(3, 1))}); }), ErrorCode::InvalidTestObject);
  EXPECT_EQ(code_of([&] { is_semistable(c, p, {c.whole()}); }), ErrorCode::InvalidTestObject);
  EXPECT_EQ(code_of([&] { is_semistable(c, p, {ComplexClass::at(5, sheaf1(1, 1))}); }), ErrorCode::InvalidTestObject);
}

TEST(Sigma0Semistable, Examples) {
  const std::map<int, Rational> eta{{0, 0}, {1, 1}};
  ComplexClass f = ComplexClass::at(0, {2, Polynomial::constant(2)});
  f.set(1, {1, Polynomial::constant(1)});
  const ComplexClass ker = ComplexClass::at(0, {1, Polynomial::constant(1)});
  EXPECT_EQ(sigma0_semistable(f, eta, {ker}).kind, VerdictKind::Destabilized);

  const SessionConfig cfg{1, 1};
  const FormalComplex cone = cone_of_identity(sheaf1(1, 1), 0, cfg);
  EXPECT_TRUE(sigma0_semistable(cone, setup_a(), structural_test_family(cone)).semistable());

  const FormalComplex sh = sheaf_complex(sheaf1(2, 3), 1, cfg);
  EXPECT_EQ(sigma0_semistable(sh, setup_a(), {ComplexClass::at(1, sheaf1(1, 1))}).kind, VerdictKind::Semistable);
}

TEST(Rescale, Examples) {
  const StabilityParameters p = to_parameters(setup_a());
  EXPECT_EQ(rescale_parameters(p, 1), p);
  const StabilityParameters r = rescale_parameters(to_parameters(setup_a().with_epsilon(1)), 10);
  EXPECT_EQ(r.delta, Polynomial::constant(10));
  EXPECT_EQ(r.eta.at(1), q("1/10"));
  EXPECT_EQ(rescale_parameters(rescale_parameters(p, 2), 3), rescale_parameters(p, 6));
  for (const auto& e : structural_test_family(c1()))
    EXPECT_EQ(reduced_hilbert(e, rescale_parameters(p, 10)), reduced_hilbert(e, p));
  EXPECT_EQ(code_of([&] { rescale_parameters(p, 0); }), ErrorCode::InvalidInput);
}

TEST(Parameters, Validation) {
  const SessionConfig cfg{1, 1};
  EXPECT_TRUE(validate_family(setup_a(), cfg).empty());
  EpsilonFamily f = setup_a();
  f.eta[1] = 0;
  EXPECT_FALSE(validate_family(f, cfg).empty());
  f = setup_a();
  f.delta = Polynomial{1, 1};
  EXPECT_FALSE(validate_family(f, cfg).empty());
  StabilityParameters p = to_parameters(setup_a());
  p.sigma = {{0, 0}, {1, 0}};
  EXPECT_FALSE(validate_parameters(p, cfg).empty());
  p.sigma_zero_family = true;
  EXPECT_TRUE(validate_parameters(p, cfg).empty());
}

TEST(DestabilizingThreshold, C1Kernel) {
  const FormalComplex c = c1();
  const ComplexClass ker = ComplexClass::at(0, sheaf1(1, 1));
  const Bound b = destabilizing_threshold(ker, c.whole(), setup_a(), c.config);
  ASSERT_TRUE(b.value);
  EXPECT_EQ(*b.value, 2);
  const ComplexClass h1_site = ComplexClass::at(0, sheaf1(2, 2));
  EXPECT_EQ(code_of([&] { destabilizing_threshold(c.whole() - h1_site, c.whole(), setup_a(), c.config); }),
            ErrorCode::InvalidInput);
}

TEST(StabilityProperty, VerdictInvariantUnderNormalizeAndRescale) {
  Gen g(31);
  for (int t = 0; t < 300; ++t) {
    const FormalComplex c = g.complex(g.uniform(1, 2));
    const auto tests = structural_test_family(c);
    const StabilityParameters p = g.parameters(c);
    const Verdict v = is_semistable(c, p, tests);
    const Verdict vn = is_semistable(c, normalize_eta(p, c), tests);
    EXPECT_EQ(v.kind, vn.kind);
    EXPECT_EQ(v.witness, vn.witness);
    for (int K : {2, 3, 7}) {
      const Verdict vr = is_semistable(c, rescale_parameters(p, K), tests);
      EXPECT_EQ(v.kind, vr.kind);
      EXPECT_EQ(v.witness, vr.witness);
    }
  }
}

TEST(StabilityProperty, WholeIsWeightedAverageOfPieces) {
  Gen g(32);
  for (int t = 0; t < 300; ++t) {
    const FormalComplex c = g.complex(g.uniform(1, 2));
    const StabilityParameters p = g.parameters(c);
    const auto pieces = g.coin(0.5) ? sigma0_hn_filtration(c).quotients : refined_pieces(c);
    Polynomial sum;
    Rational weight = 0;
    for (const auto& piece : pieces) {
      Rational w = 0;
      for (const auto& [i, s] : piece.piece.pieces()) w += Rational(p.sigma_at(i)) * s.rank;
      sum += reduced_hilbert(piece.piece, p) * w;
      weight += w;
    }
    EXPECT_EQ(sum / weight, reduced_hilbert(c, p));
  }
}

// A witness with strictly smaller eta-average destabilizes below its threshold and
// not above it.
TEST(StabilityProperty, ThresholdForSigma0Witness) {
  Gen g(33);
  int finite = 0;
  for (int t = 0; t < 400; ++t) {
    const FormalComplex c = g.complex(g.uniform(1, 2));
    const EpsilonFamily f = g.family(c);
    for (const auto& e : structural_test_family(c)) {
      if (!(eta_average(e, f.eta) < eta_average(c.whole(), f.eta))) continue;
      const Bound b = destabilizing_threshold(e, c.whole(), f, c.config);
      const auto destabilizes = [&](const Rational& eps) {
        return asymptotically_greater(reduced_hilbert(e, f.with_epsilon(eps)),
                                      reduced_hilbert(c.whole(), f.with_epsilon(eps)));
      };
      if (b.is_unbounded()) {
        EXPECT_TRUE(destabilizes(Rational(1000)));
        EXPECT_TRUE(destabilizes(Rational(1, 1000)));
        continue;
      }
      ++finite;
      EXPECT_GT(*b.value, 0);
      EXPECT_TRUE(destabilizes(*b.value * Rational(99, 100)));
      EXPECT_FALSE(destabilizes(*b.value * Rational(101, 100)));
    }
  }
  EXPECT_GT(finite, 20);
}
