#include <gtest/gtest.h>

#include <random>

#include "qlane/errors.hpp"
#include "qlane/game.hpp"

using namespace qlane;

namespace {

StandardizationStats unit_stats() {
  StandardizationStats s;
  s.std.fill(1.0);
  return s;
}

}  // namespace

TEST(Standardize, MeanMapsToZero) {
  StandardizationStats st;
  for (std::size_t i = 0; i < kStateDim; ++i) {
    st.mean[i] = 1.5 * static_cast<double>(i) - 3.0;
    st.std[i] = 0.5 + static_cast<double>(i);
  }
  const FeatureVector x = standardize(st.mean, st);
  EXPECT_EQ(x[0], 1.0);
  for (std::size_t i = 1; i < kFeatureDim; ++i) EXPECT_EQ(x[i], 0.0);
}

TEST(Standardize, IdentityStats) {
  LaneChangeState raw;
  for (std::size_t i = 0; i < kStateDim; ++i) raw[i] = static_cast<double>(i) * 0.7 - 2.0;
  const FeatureVector x = standardize(raw, unit_stats());
  EXPECT_EQ(x[0], 1.0);
  for (std::size_t i = 0; i < kStateDim; ++i) EXPECT_EQ(x[i + 1], raw[i]);
}

TEST(Standardize, TwoSigmaEverywhere) {
  StandardizationStats st;
  LaneChangeState raw;
  for (std::size_t i = 0; i < kStateDim; ++i) {
    st.mean[i] = 10.0 - static_cast<double>(i);
    st.std[i] = 0.25 * static_cast<double>(i + 1);
    raw[i] = st.mean[i] + 2.0 * st.std[i];
  }
  const FeatureVector x = standardize(raw, st);
  EXPECT_EQ(x[0], 1.0);
  for (std::size_t i = 1; i < kFeatureDim; ++i) EXPECT_NEAR(x[i], 2.0, 1e-12);
}

TEST(Standardize, Errors) {
  LaneChangeState raw{};
  raw[4] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(standardize(raw, unit_stats()), DomainError);
  StandardizationStats bad = unit_stats();
  bad.std[2] = 0.0;
  EXPECT_THROW(standardize(LaneChangeState{}, bad), ConfigError);
}

TEST(Utility, ZeroCoefficients) {
  const FeatureVector beta{};
  FeatureVector x;
  x.fill(3.0);
  EXPECT_EQ(utility(beta, x), 0.0);
}

TEST(Utility, InterceptOnly) {
  FeatureVector beta{};
  beta[0] = -1.25;
  const FeatureVector x = standardize(LaneChangeState{}, unit_stats());
  EXPECT_EQ(utility(beta, x), -1.25);
}

TEST(Utility, MatchesLongDoubleSummation) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    FeatureVector beta, x;
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
      beta[i] = n(rng);
      x[i] = n(rng);
    }
    long double ref = 0.0L;
    for (std::size_t i = 0; i < kFeatureDim; ++i) ref += static_cast<long double>(beta[i]) * x[i];
    EXPECT_NEAR(utility(beta, x), static_cast<double>(ref), 1e-12);
  }
}

TEST(Utility, LengthMismatch) {
  const std::vector<double> a(12, 1.0), b(11, 1.0);
  EXPECT_THROW(utility(a, b), DomainError);
}

TEST(QuadFromUtilities, ActiveRole) {
  EXPECT_EQ(quad_from_utilities(2, -1, 4, 0, Role::Active), (PayoffQuad{2, -1, 4, 0}));
}

TEST(QuadFromUtilities, PassiveRole) {
  EXPECT_EQ(quad_from_utilities(2, -1, 4, 0, Role::Passive), (PayoffQuad{2, 4, -1, 0}));
}

TEST(QuadFromUtilities, NullGame) {
  EXPECT_EQ(quad_from_utilities(0, 0, 0, 0, Role::Active), (PayoffQuad{0, 0, 0, 0}));
  EXPECT_EQ(quad_from_utilities(0, 0, 0, 0, Role::Passive), (PayoffQuad{0, 0, 0, 0}));
}

TEST(QuadFromUtilities, RejectsUnnormalizedBaseline) {
  EXPECT_THROW(quad_from_utilities(1, 2, 3, 0.1, Role::Active), DomainError);
}

TEST(QuadFromUtilities, RoleDuality) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 200; ++i) {
    const double cc = u(rng), cd = u(rng), dc = u(rng);
    const auto a = quad_from_utilities(cc, cd, dc, 0, Role::Active);
    const auto p = quad_from_utilities(cc, cd, dc, 0, Role::Passive);
    EXPECT_EQ(a.r, p.r);
    EXPECT_EQ(a.p, p.p);
    EXPECT_EQ(a.s, p.t);
    EXPECT_EQ(a.t, p.s);
  }
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify({3, 0, 5, 1}), GameClass::PrisonersDilemma);
  EXPECT_EQ(classify({4, 0, 3, 1}), GameClass::StagHunt);
  EXPECT_EQ(classify({3, 1, 4, 0}), GameClass::Chicken);
  EXPECT_EQ(classify({3, 2, 1, 0}), GameClass::Harmony);
}

TEST(Classify, TiesAreOther) {
  EXPECT_EQ(classify({1, 1, 1, 1}), GameClass::Other);
  EXPECT_EQ(classify({3, 1, 3, 0}), GameClass::Other);  // R == T
  EXPECT_EQ(classify({3, 0, 5, 0}), GameClass::Other);  // P == S
}

TEST(Classify, InvariantUnderPositiveAffineMaps) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-10, 10);
  std::uniform_real_distribution<double> scale(0.1, 10);
  for (int i = 0; i < 2000; ++i) {
    // Integer-valued payoffs keep ties exact under the map.
    const PayoffQuad q{std::round(u(rng)), std::round(u(rng)), std::round(u(rng)), std::round(u(rng))};
    const double a = scale(rng), b = u(rng);
    const PayoffQuad m{a * q.r + b, a * q.s + b, a * q.t + b, a * q.p + b};
    EXPECT_EQ(classify(q), classify(m));
  }
}

TEST(SynthTable, ZeroPriorGivesNullGames) {
  const auto st = synth_table(1, SyntheticTableSpec::zero_coefficients(), 3);
  ASSERT_EQ(st.table.size(), 1u);
  for (auto r : kRoles)
    for (auto t : kInteractionTypes) EXPECT_EQ(st.table.quad(0, r, t.self, t.opponent), (PayoffQuad{0, 0, 0, 0}));
  const auto cc = class_distribution(st.table);
  EXPECT_EQ(cc.counts.at(GameClass::Other), cc.total);
}

TEST(SynthTable, SameSeedIdentical) {
  const auto a = synth_table(50, SyntheticTableSpec::defaults(), 99);
  const auto b = synth_table(50, SyntheticTableSpec::defaults(), 99);
  EXPECT_EQ(a.table, b.table);
  EXPECT_EQ(a.coefficients, b.coefficients);
  EXPECT_EQ(a.table.provenance(), (TableProvenance{TableProvenance::Kind::Synthetic, 99}));
}

TEST(SynthTable, PipelineMatchesStraightLineReimplementation) {
  const auto spec = SyntheticTableSpec::defaults();
  const auto st = synth_table(100, spec, 1234);
  for (std::size_t i : {0u, 17u, 42u, 63u, 99u}) {
    const auto& raw = st.states[i];
    std::array<double, 12> x{};
    x[0] = 1.0;
    for (std::size_t k = 0; k < 11; ++k) x[k + 1] = (raw[k] - spec.feature_mean[k]) / spec.feature_std[k];
    for (auto r : kRoles) {
      for (auto t : kInteractionTypes) {
        double u[3] = {0, 0, 0};
        for (int o = 0; o < 3; ++o) {
          const auto& beta = st.coefficients.at(r, t, static_cast<Outcome>(o));
          for (std::size_t k = 0; k < 12; ++k) u[o] += beta[k] * x[k];
        }
        const auto& q = st.table.quad(i, r, t.self, t.opponent);
        EXPECT_NEAR(q.r, u[0], 1e-12);
        EXPECT_NEAR(q.s, r == Role::Active ? u[1] : u[2], 1e-12);
        EXPECT_NEAR(q.t, r == Role::Active ? u[2] : u[1], 1e-12);
        EXPECT_EQ(q.p, 0.0);
      }
    }
    EXPECT_GE(raw[3], 0.0);
    EXPECT_GE(raw[7], 0.0);
  }
}

TEST(SynthTable, PdFractionReportedAndSeedDependent) {
  auto pd_fraction = [](std::uint64_t seed) {
    const auto cc = class_distribution(synth_table(100, SyntheticTableSpec::defaults(), seed).table);
    const auto it = cc.counts.find(GameClass::PrisonersDilemma);
    return it == cc.counts.end() ? 0.0 : static_cast<double>(it->second) / cc.total;
  };
  const double a = pd_fraction(1), b = pd_fraction(2);
  EXPECT_GT(a, 0.0);
  EXPECT_LT(a, 0.5);
  EXPECT_NE(a, b);
}

TEST(SynthTable, EveryQuadHasZeroPunishment) {
  const auto st = synth_table(200, SyntheticTableSpec::defaults(), 5);
  for (std::size_t i = 0; i < st.table.size(); ++i)
    for (auto r : kRoles)
      for (auto t : kInteractionTypes) EXPECT_EQ(st.table.quad(i, r, t.self, t.opponent).p, 0.0);
}

TEST(SynthTable, InvalidSpec) {
  auto spec = SyntheticTableSpec::defaults();
  spec.feature_std[5] = -1.0;
  EXPECT_THROW(synth_table(10, spec, 1), ConfigError);
  EXPECT_THROW(synth_table(0, SyntheticTableSpec::defaults(), 1), ConfigError);
}

TEST(UtilityCoefficients, DdMustStayZero) {
  UtilityCoefficients c;
  FeatureVector beta{};
  beta[3] = 0.1;
  EXPECT_THROW(c.set(Role::Active, kInteractionTypes[0], Outcome::DD, beta), DomainError);
  EXPECT_NO_THROW(c.set(Role::Active, kInteractionTypes[0], Outcome::CD, beta));
}

TEST(PayoffTable, MissingRecordIsCompletenessError) {
  PayoffTable t({"a"});
  t.set(0, Role::Active, VehicleType::HDV, VehicleType::HDV, {1, 2, 3, 0});
  EXPECT_THROW(t.check_complete(), CompletenessError);
  EXPECT_THROW((void)t.quad(0, Role::Passive, VehicleType::HDV, VehicleType::HDV), CompletenessError);
}
