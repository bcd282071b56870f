#include <gtest/gtest.h>

#include "support/generators.hpp"

using namespace hnstrat;
using hnstrat::testing::c1;
using hnstrat::testing::Gen;
using hnstrat::testing::sheaf1;

TEST(ValidateComplex, C1DerivedClasses) {
  const FormalComplex c = c1();
  EXPECT_TRUE(validate_complex(c).empty());
  EXPECT_EQ(c.kernel(0), sheaf1(1, 1));
  EXPECT_EQ(c.cohomology(0), sheaf1(1, 1));
  EXPECT_EQ(c.cohomology(1), sheaf1(1, 2));
  EXPECT_TRUE(c.kernel(1) == c.term(1));
}

TEST(ValidateComplex, SingleSheaf) {
  const FormalComplex c = sheaf_complex(sheaf1(2, 3), 0, {1, 1});
  EXPECT_TRUE(validate_complex(c).empty());
  EXPECT_EQ(c.cohomology(0), c.term(0));
}

TEST(ValidateComplex, ImageRankTooLarge) {
  FormalComplex c = c1();
  c.images[0] = sheaf1(3, 3);
  c.imageHN.clear();
  const auto problems = validate_complex(c);
  ASSERT_FALSE(problems.empty());
  EXPECT_TRUE(std::any_of(problems.begin(), problems.end(),
                          [](const std::string& s) { return s.find("rank exceeds") != std::string::npos; }));
}

TEST(ValidateComplex, TorsionCohomologyFlagged) {
  FormalComplex c = c1();
  c.images[0] = {2, Polynomial{1, 2}};
  c.imageHN.clear();
  c.cohomologyHN.clear();
  const auto problems = validate_complex(c);
  EXPECT_TRUE(std::any_of(problems.begin(), problems.end(),
                          [](const std::string& s) { return s.find("torsion") != std::string::npos; }));
}

TEST(ValidateComplex, HNListChecks) {
  FormalComplex c = c1();
  c.cohomologyHN[1] = {sheaf1(1, 1)};
  EXPECT_FALSE(validate_complex(c).empty());
  c = sheaf_complex(sheaf1(2, 4), 0, {1, 1}, std::vector<SheafClass>{sheaf1(1, 1), sheaf1(1, 3)});
  EXPECT_FALSE(validate_complex(c).empty());
  c = sheaf_complex(sheaf1(2, 4), 0, {1, 1}, std::vector<SheafClass>{sheaf1(1, 3), sheaf1(1, 1)});
  EXPECT_TRUE(validate_complex(c).empty());
}

TEST(ValidateComplex, EndTermsAndLeadingCoefficient) {
  FormalComplex c = c1();
  c.m2 = 2;
  EXPECT_FALSE(validate_complex(c).empty());
  c = c1();
  c.terms[1] = {2, Polynomial{3, 3}};
  EXPECT_FALSE(validate_complex(c).empty());
}

TEST(Shift, Examples) {
  const SessionConfig cfg{1, 1};
  const FormalComplex s0 = sheaf_complex(sheaf1(1, 1), 0, cfg);
  EXPECT_EQ(shift(s0, -1), sheaf_complex(sheaf1(1, 1), -1, cfg));
  EXPECT_EQ(shift(shift(c1(), 3), -3), c1());
  const FormalComplex s = shift(c1(), 2);
  EXPECT_EQ(s.m1, 2);
  EXPECT_EQ(s.m2, 3);
  EXPECT_EQ(s.term(2), c1().term(0));
  EXPECT_EQ(s.image(2), c1().image(0));
  EXPECT_TRUE(validate_complex(s).empty());
}

TEST(ConeOfIdentity, Example) {
  const FormalComplex c = cone_of_identity(sheaf1(1, 1), 0, {1, 1});
  EXPECT_TRUE(validate_complex(c).empty());
  EXPECT_EQ(c.term(0), sheaf1(1, 1));
  EXPECT_EQ(c.term(1), sheaf1(1, 1));
  EXPECT_EQ(c.image(0), sheaf1(1, 1));
  EXPECT_TRUE(c.cohomology(0).is_zero());
  EXPECT_TRUE(c.cohomology(1).is_zero());
}

TEST(PieceLabel, Strings) {
  EXPECT_EQ(to_string(PieceLabel{PieceKind::Cohomology, 0, 1}), "H(0,1)");
  EXPECT_EQ(to_string(PieceLabel{PieceKind::Cone, -2, std::nullopt}), "I(-2)");
}

TEST(ComplexModelProperty, EulerBookkeeping) {
  Gen g(21);
  for (int t = 0; t < 300; ++t) {
    const FormalComplex c = g.complex(g.uniform(1, 2));
    ASSERT_TRUE(validate_complex(c).empty());
    SheafClass lhs, rhs;
    for (int i = c.m1; i <= c.m2; ++i) {
      lhs += c.cohomology(i) + c.image(i) + c.image(i);
      rhs += c.term(i);
    }
    EXPECT_EQ(lhs.hilbert, rhs.hilbert);
    EXPECT_EQ(lhs.rank, rhs.rank);
  }
}

TEST(ComplexModelProperty, ValidationIdempotentAndOrderIndependent) {
  Gen g(22);
  for (int t = 0; t < 200; ++t) {
    FormalComplex c = g.complex(g.uniform(1, 2));
    if (g.coin(0.5)) c.terms[c.m1] = c.terms[c.m1] + hnstrat::testing::sheaf1(1, 0);
    if (g.coin(0.5) && !c.images.empty()) c.images.begin()->second.rank += 5;
    const auto first = validate_complex(c);
    EXPECT_EQ(first, validate_complex(c));
    EXPECT_TRUE(std::is_sorted(first.begin(), first.end()));
    FormalComplex rebuilt;
    rebuilt.config = c.config;
    rebuilt.m1 = c.m1;
    rebuilt.m2 = c.m2;
    for (auto it = c.terms.rbegin(); it != c.terms.rend(); ++it) rebuilt.terms.emplace(it->first, it->second);
    for (auto it = c.images.rbegin(); it != c.images.rend(); ++it) rebuilt.images.emplace(it->first, it->second);
    for (auto it = c.cohomologyHN.rbegin(); it != c.cohomologyHN.rend(); ++it) rebuilt.cohomologyHN.emplace(*it);
    for (auto it = c.imageHN.rbegin(); it != c.imageHN.rend(); ++it) rebuilt.imageHN.emplace(*it);
    EXPECT_EQ(first, validate_complex(rebuilt));
  }
}

TEST(ComplexModelProperty, ConeOfSemistableSheafClassifiesAsCone) {
  Gen g(23);
  for (int t = 0; t < 200; ++t) {
    const SessionConfig cfg{g.uniform(1, 2), 1};
    const SheafClass s = g.sheaf(cfg, g.uniform(1, 3));
    const int k = g.uniform(-3, 3);
    const FormalComplex c = cone_of_identity(s, k, cfg);
    ASSERT_TRUE(validate_complex(c).empty());
    const Sigma0Class cls = sigma0_classify(c);
    EXPECT_EQ(cls.shape, Sigma0Shape::ConeOfIdentity);
    EXPECT_EQ(cls.position, k);
  }
}

TEST(ComplexModelProperty, ShiftRoundTrip) {
  Gen g(24);
  for (int t = 0; t < 200; ++t) {
    const FormalComplex c = g.complex(g.uniform(1, 2));
    const int k = g.uniform(-5, 5);
    EXPECT_EQ(shift(shift(c, k), -k), c);
    EXPECT_TRUE(validate_complex(shift(c, k)).empty());
  }
}
