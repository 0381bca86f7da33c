#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "trustlab/measures.hpp"
#include "trustlab/payoff.hpp"

using namespace trustlab;

namespace {

const PayoffMatrix kWorkedExample(50, -100, -50, 30, 30, -50, -10, 20);

TEST(Payoff, RejectsNonFiniteAndDegenerate) {
  EXPECT_THROW(PayoffMatrix(NAN, 0, 0, 1, 1, 0, 0, 0), InputError);
  EXPECT_THROW(PayoffMatrix(1, 0, INFINITY, 1, 1, 0, 0, 0), InputError);
  EXPECT_THROW(PayoffMatrix(2, 2, 2, 2, 1, 0, 0, 0), InputError);
  EXPECT_THROW(PayoffMatrix(1, 0, 0, 0, 0, 0, 0, 0), InputError);
  EXPECT_NO_THROW(PayoffMatrix(1, 0, 0, 0, 0, 0, 0, 1));
}

TEST(Payoff, AccessorsFollowRowColumnLayout) {
  EXPECT_EQ(kWorkedExample.a(1, 2), -100);
  EXPECT_EQ(kWorkedExample.a(2, 1), -50);
  EXPECT_EQ(kWorkedExample.b(2, 2), 20);
  EXPECT_EQ(kWorkedExample.cells(Player::kTrustee)[1], -50);
}

TEST(Normalize, WorkedExample) {
  const NormalizedPayoffMatrix n = normalize(kWorkedExample);
  EXPECT_EQ(n.scale_a, 100);
  EXPECT_EQ(n.scale_b, 50);
  EXPECT_EQ(n.payoffs.trustor(), (Cells{0.5, -1.0, -0.5, 0.3}));
  EXPECT_EQ(n.payoffs.trustee(), (Cells{0.6, -1.0, -0.2, 0.4}));
}

TEST(Normalize, AlreadyNormalizedIsUnchanged) {
  const PayoffMatrix m(1, -1, 0, 0, 1, 0, 0, 0);
  const NormalizedPayoffMatrix n = normalize(m);
  EXPECT_EQ(n.scale_a, 1);
  EXPECT_EQ(n.payoffs, m);
}

TEST(Normalize, IdempotentAndUnitMaximum) {
  oracle::GameSampler s(11);
  for (int i = 0; i < 2000; ++i) {
    const PayoffMatrix m = s.any(std::pow(10.0, s.uniform(0, 7)));
    const NormalizedPayoffMatrix n = normalize(m);
    EXPECT_EQ(normalize(n.payoffs).payoffs, n.payoffs);
    for (Player p : {Player::kTrustor, Player::kTrustee}) {
      double mx = 0;
      for (double v : n.payoffs.cells(p)) mx = std::max(mx, std::abs(v));
      EXPECT_EQ(mx, 1.0);
    }
  }
}

TEST(Decompose, WorkedExampleNormalizedWeights) {
  const InterdependenceWeights w = decompose(normalize(kWorkedExample));
  EXPECT_TRUE(w.normalized);
  EXPECT_NEAR(w.rc_a, -0.15, 1e-15);
  EXPECT_NEAR(w.fc_a, 0.35, 1e-15);
  EXPECT_NEAR(w.bc_a, 1.15, 1e-15);
  EXPECT_NEAR(w.rc_b, 0.5, 1e-15);
  EXPECT_NEAR(w.fc_b, -0.3, 1e-15);
  EXPECT_NEAR(w.bc_b, 1.1, 1e-15);
  EXPECT_FALSE(decompose(kWorkedExample).normalized);
}

TEST(Decompose, ZeroSumRowsCancel) {
  const InterdependenceWeights w = decompose(PayoffMatrix(1, -1, 0, 0, 1, 0, 0, 0));
  EXPECT_EQ(w.rc_a, 0);
  EXPECT_EQ(w.fc_a, 1);
  EXPECT_EQ(w.bc_a, 1);
}

TEST(Decompose, LinearInAffineMaps) {
  oracle::GameSampler s(3);
  for (int i = 0; i < 1000; ++i) {
    const PayoffMatrix m = s.any();
    const double k = s.uniform(0.01, 100), c = s.uniform(-50, 50);
    const InterdependenceWeights w = decompose(m);
    const InterdependenceWeights t = decompose(affine_transform(m, Player::kTrustor, k, c));
    const double tol = 1e-12 * (1 + k + std::abs(c));
    EXPECT_NEAR(t.rc_a, k * w.rc_a, tol);
    EXPECT_NEAR(t.fc_a, k * w.fc_a, tol);
    EXPECT_NEAR(t.bc_a, k * w.bc_a, tol);
    EXPECT_EQ(t.rc_b, w.rc_b);
  }
}

TEST(Decompose, ReconstructionRoundTrip) {
  oracle::GameSampler s(5);
  for (int i = 0; i < 10000; ++i) {
    const PayoffMatrix m = s.any(10);
    const InterdependenceWeights w = decompose(m);
    const Cells& a = m.trustor();
    const double mean = 0.25 * (a[0] + a[1] + a[2] + a[3]);
    const Cells back = oracle::reconstruct_trustor(mean, w.rc_a, w.fc_a, w.bc_a);
    for (int j = 0; j < 4; ++j) ASSERT_NEAR(back[j], a[j], 1e-12);
    const InterdependenceWeights again = decompose(PayoffMatrix(back, m.trustee()));
    ASSERT_NEAR(again.rc_a, w.rc_a, 1e-12);
    ASSERT_NEAR(again.fc_a, w.fc_a, 1e-12);
    ASSERT_NEAR(again.bc_a, w.bc_a, 1e-12);
  }
}

TEST(Decompose, NormalizedWeightRanges) {
  oracle::GameSampler s(7);
  for (int i = 0; i < 100000; ++i) {
    const PayoffMatrix m = s.trust_game(s.uniform(1, 1000));
    const InterdependenceWeights w = decompose(normalize(m));
    ASSERT_GT(w.rc_a, -1);
    ASSERT_LT(w.rc_a, 1);
    // fc_a = ((a11 - a12) + (a21 - a22)) / 2 with each gap in (-2, 2].
    ASSERT_GT(w.fc_a, 0);
    ASSERT_LT(w.fc_a, 2);
    ASSERT_GT(w.bc_a, 0);
    ASSERT_LT(w.bc_a, 2);
    for (double v : {w.rc_b, w.fc_b, w.bc_b}) {
      ASSERT_GE(v, -2);
      ASSERT_LE(v, 2);
    }
  }
}

TEST(Decompose, DegeneratePairIdentities) {
  oracle::GameSampler s(9);
  for (int i = 0; i < 10000; ++i) {
    const double a2 = s.uniform(-1, 1), b2 = s.uniform(-1, 1);
    const PayoffMatrix m(s.uniform(-1, 1), s.uniform(-1, 1), a2, a2,
                         s.uniform(-1, 1), s.uniform(-1, 1), b2, b2);
    const InterdependenceWeights w = decompose(m);
    ASSERT_EQ(w.fc_a, w.bc_a);
    ASSERT_EQ(w.rc_b, w.bc_b);
  }
}

TEST(Concordance, WorkedExample) {
  const ConcordanceReport c = concordance(decompose(normalize(kWorkedExample)));
  EXPECT_TRUE(c.correspondence);
  EXPECT_FALSE(c.correspondence_indeterminate);
  EXPECT_EQ(c.trustor.fc, SignRelation::kConcordant);
  EXPECT_EQ(c.trustor.rc, SignRelation::kDiscordant);
}

TEST(Concordance, AllPositiveAndMismatch) {
  InterdependenceWeights w{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, true};
  ConcordanceReport c = concordance(w);
  EXPECT_TRUE(c.correspondence);
  EXPECT_EQ(c.trustor.rc, SignRelation::kConcordant);
  EXPECT_EQ(c.trustee.fc, SignRelation::kConcordant);
  w.bc_b = -0.6;
  c = concordance(w);
  EXPECT_FALSE(c.correspondence);
  EXPECT_EQ(c.trustee.rc, SignRelation::kDiscordant);
}

TEST(Concordance, ZeroIsIndeterminateAndSymmetric) {
  InterdependenceWeights w{0.0, 0.2, 0.0, 0.4, 0.5, 0.6, true};
  const ConcordanceReport c = concordance(w);
  EXPECT_TRUE(c.correspondence_indeterminate);
  EXPECT_FALSE(c.correspondence);
  EXPECT_EQ(c.trustor.rc, SignRelation::kIndeterminate);
  EXPECT_EQ(ConcordanceReport::kZeroSignPolicy, "indeterminate");
  InterdependenceWeights swapped{w.rc_b, w.fc_b, w.bc_b, w.rc_a, w.fc_a, w.bc_a, true};
  EXPECT_EQ(concordance(swapped).correspondence, c.correspondence);
}

TEST(Affine, IdentityAndErrors) {
  EXPECT_EQ(affine_transform(kWorkedExample, Player::kTrustor, 1, 0), kWorkedExample);
  EXPECT_THROW(affine_transform(kWorkedExample, Player::kTrustor, 0, 0), InputError);
  EXPECT_THROW(affine_transform(kWorkedExample, Player::kTrustee, -2, 0), InputError);
}

TEST(Affine, WorkedExamples) {
  const PayoffMatrix big = affine_transform(kWorkedExample, Player::kTrustor, 1000, 0);
  EXPECT_EQ(big.a12(), -100000);
  EXPECT_NEAR(trust_index(big), 20.0 / 70.0, 1e-12);
  const PayoffMatrix shifted = affine_transform(kWorkedExample, Player::kTrustee, 1, 50);
  EXPECT_EQ(shifted.b12(), 0);
  EXPECT_EQ(spe(shifted).trustee_choice_if_trusted, spe(kWorkedExample).trustee_choice_if_trusted);
}

}  // namespace
