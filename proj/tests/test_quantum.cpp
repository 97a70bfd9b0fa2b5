#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qlane/errors.hpp"
#include "qlane/quantum.hpp"

using namespace qlane;

namespace {

void expect_amps(const TwoQubitState& st, std::array<double, 4> ref, double tol = 1e-12) {
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(st.amps[i].real(), ref[i], tol) << "i=" << i;
    EXPECT_NEAR(st.amps[i].imag(), 0.0, tol) << "i=" << i;
  }
}

TwoQubitState random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  TwoQubitState st;
  double norm = 0.0;
  for (auto& a : st.amps) {
    a = {n(rng), n(rng)};
    norm += std::norm(a);
  }
  for (auto& a : st.amps) a /= std::sqrt(norm);
  return st;
}

const PayoffQuad kPd{3, 0, 5, 1};

}  // namespace

// ---------- make_initial_state ----------

TEST(InitialState, ClassicalLimitIsGround) { expect_amps(make_initial_state(0.0), {1, 0, 0, 0}); }

TEST(InitialState, MaximalEntanglement) {
  const double h = 1.0 / std::sqrt(2.0);
  expect_amps(make_initial_state(0.5), {h, 0, 0, h});
}

TEST(InitialState, ComplementaryLimit) { expect_amps(make_initial_state(1.0), {0, 0, 0, 1}); }

TEST(InitialState, RejectsOutOfRange) {
  EXPECT_THROW(make_initial_state(-0.01), DomainError);
  EXPECT_THROW(make_initial_state(1.01), DomainError);
  EXPECT_THROW(make_initial_state(std::nan("")), DomainError);
}

TEST(InitialState, NormalizedAcrossGrid) {
  for (int i = 0; i <= 100; ++i) {
    EXPECT_NEAR(make_initial_state(i / 100.0).norm_squared(), 1.0, 1e-12);
  }
}

// ---------- apply_strategies ----------

TEST(ApplyStrategies, IdentityKeepsState) {
  expect_amps(apply_strategies(make_initial_state(0.0), kCooperate, kCooperate), {1, 0, 0, 0});
}

TEST(ApplyStrategies, DoubleFlip) {
  expect_amps(apply_strategies(make_initial_state(0.0), kDefect, kDefect), {0, 0, 0, 1});
}

TEST(ApplyStrategies, ActiveFlipOnEntangledState) {
  // X (x) I on a|00> + b|11> = a|10> + b|01>
  const double b2 = 0.3;
  const double a = std::sqrt(0.7), b = std::sqrt(0.3);
  expect_amps(apply_strategies(make_initial_state(b2), kDefect, kCooperate), {0, b, a, 0});
}

TEST(ApplyStrategies, MatchesKroneckerOracleOnRandomStates) {
  std::mt19937_64 rng(11);
  const StrategyOperator ops[] = {kCooperate, kDefect};
  for (int trial = 0; trial < 200; ++trial) {
    const TwoQubitState st = random_state(rng);
    for (auto ua : ops) {
      for (auto ub : ops) {
        const auto got = apply_strategies(st, ua, ub);
        const auto m = oracle::kron(ua == kDefect ? oracle::pauli_x() : oracle::identity(),
                                    ub == kDefect ? oracle::pauli_x() : oracle::identity());
        const auto ref = oracle::matvec(m, st.amps);
        for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(got.amps[i] - ref[i]), 0.0, 1e-14);
        EXPECT_NEAR(got.norm_squared(), 1.0, 1e-12);
      }
    }
  }
}

TEST(ApplyStrategies, RejectsUnnormalized) {
  TwoQubitState st;
  st.amps[0] = 2.0;
  EXPECT_THROW(apply_strategies(st, kCooperate, kCooperate), DomainError);
}

// ---------- expected_payoff ----------

TEST(ExpectedPayoff, BattleOfSexesMaximalEntanglement) {
  // alpha = 2, beta = 1, gamma = 0
  const PayoffOperator alice{{2, 0, 0, 1}};
  const PayoffOperator bob{{1, 0, 0, 2}};
  const auto fin = apply_strategies(make_initial_state(0.5), kCooperate, kCooperate);
  EXPECT_NEAR(expected_payoff(fin, alice), 1.5, 1e-12);
  EXPECT_NEAR(expected_payoff(fin, bob), 1.5, 1e-12);
}

TEST(ExpectedPayoff, BattleOfSexesClassical) {
  const PayoffOperator alice{{2, 0, 0, 1}};
  EXPECT_NEAR(expected_payoff(apply_strategies(make_initial_state(0.0), kCooperate, kCooperate), alice), 2.0,
              1e-12);
  EXPECT_NEAR(expected_payoff(apply_strategies(make_initial_state(0.0), kDefect, kDefect), alice), 1.0, 1e-12);
}

TEST(ExpectedPayoff, WithinOperatorRange) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 500; ++trial) {
    const PayoffOperator op{{u(rng), u(rng), u(rng), u(rng)}};
    const double v = expected_payoff(random_state(rng), op);
    EXPECT_GE(v, *std::min_element(op.diag.begin(), op.diag.end()) - 1e-12);
    EXPECT_LE(v, *std::max_element(op.diag.begin(), op.diag.end()) + 1e-12);
  }
}

TEST(ExpectedPayoff, RejectsUnnormalized) {
  TwoQubitState st;
  st.amps[0] = 1.0;
  st.amps[3] = 1e-4;  // |psi|^2 - 1 = 1e-8 > 1e-9
  EXPECT_THROW(expected_payoff(st, PayoffOperator{}), DomainError);
}

// ---------- quantum_payoffs ----------

TEST(QuantumPayoffs, ClassicalLimit) {
  EXPECT_EQ(quantum_payoffs(kPd, EntanglementParam(0.0)), (QuantumPayoffQuad{3, 0, 5, 1}));
}

TEST(QuantumPayoffs, FullSwap) {
  EXPECT_EQ(quantum_payoffs(kPd, EntanglementParam(1.0)), (QuantumPayoffQuad{1, 5, 0, 3}));
}

TEST(QuantumPayoffs, HalfEntangledMatchesStateVector) {
  // Frozen from oracle::mw_payoff(3,0,5,1,0.5,...) for the four pairs.
  const auto q = quantum_payoffs(kPd, EntanglementParam(0.5));
  EXPECT_NEAR(q.rq, 2.0, 1e-12);
  EXPECT_NEAR(q.sq, 2.5, 1e-12);
  EXPECT_NEAR(q.tq, 2.5, 1e-12);
  EXPECT_NEAR(q.pq, 2.0, 1e-12);
  EXPECT_NEAR(oracle::mw_payoff(3, 0, 5, 1, 0.5, false, false), 2.0, 1e-12);
  EXPECT_NEAR(oracle::mw_payoff(3, 0, 5, 1, 0.5, false, true), 2.5, 1e-12);
  EXPECT_NEAR(oracle::mw_payoff(3, 0, 5, 1, 0.5, true, false), 2.5, 1e-12);
  EXPECT_NEAR(oracle::mw_payoff(3, 0, 5, 1, 0.5, true, true), 2.0, 1e-12);
}

TEST(QuantumPayoffs, AgreesWithExplicitMatrixOracleForBothRoles) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const PayoffQuad c{u(rng), u(rng), u(rng), u(rng)};
    const double b2 = std::uniform_real_distribution<double>(0, 1)(rng);
    const auto q = quantum_payoffs(c, EntanglementParam(b2));
    // Active player owns the first qubit.
    EXPECT_NEAR(q.rq, oracle::mw_payoff(c.r, c.s, c.t, c.p, b2, false, false), 1e-12);
    EXPECT_NEAR(q.sq, oracle::mw_payoff(c.r, c.s, c.t, c.p, b2, false, true), 1e-12);
    EXPECT_NEAR(q.tq, oracle::mw_payoff(c.r, c.s, c.t, c.p, b2, true, false), 1e-12);
    EXPECT_NEAR(q.pq, oracle::mw_payoff(c.r, c.s, c.t, c.p, b2, true, true), 1e-12);
    // Passive player owns the second qubit: its operator is R,T,S,P.
    const auto st = [&](StrategyOperator a, StrategyOperator p) {
      return expected_payoff(apply_strategies(make_initial_state(b2), a, p), passive_payoff_operator(c));
    };
    EXPECT_NEAR(q.rq, st(kCooperate, kCooperate), 1e-12);
    EXPECT_NEAR(q.sq, st(kDefect, kCooperate), 1e-12);
    EXPECT_NEAR(q.tq, st(kCooperate, kDefect), 1e-12);
    EXPECT_NEAR(q.pq, st(kDefect, kDefect), 1e-12);
  }
}

TEST(QuantumPayoffs, EachEntryBetweenItsBlendPair) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 500; ++trial) {
    const PayoffQuad c{u(rng), u(rng), u(rng), u(rng)};
    const auto q = quantum_payoffs(c, EntanglementParam(std::uniform_real_distribution<double>(0, 1)(rng)));
    auto between = [](double v, double a, double b) {
      return v >= std::min(a, b) - 1e-12 && v <= std::max(a, b) + 1e-12;
    };
    EXPECT_TRUE(between(q.rq, c.r, c.p));
    EXPECT_TRUE(between(q.pq, c.r, c.p));
    EXPECT_TRUE(between(q.sq, c.s, c.t));
    EXPECT_TRUE(between(q.tq, c.s, c.t));
  }
}

// ---------- ess_regime ----------

TEST(EssRegime, LowEntanglementDefection) {
  const auto r = ess_regime(kPd, EntanglementParam(0.2));
  EXPECT_EQ(r.kind, EssKind::DefectionESS);
  EXPECT_FALSE(r.p_star.has_value());
}

TEST(EssRegime, HighEntanglementCooperation) {
  const auto r = ess_regime(kPd, EntanglementParam(0.8));
  EXPECT_EQ(r.kind, EssKind::CooperationESS);
  EXPECT_FALSE(r.p_star.has_value());
}

TEST(EssRegime, IntermediateMixedMatchesReplicator) {
  const auto r = ess_regime(kPd, EntanglementParam(0.5));
  ASSERT_EQ(r.kind, EssKind::MixedESS);
  ASSERT_TRUE(r.p_star.has_value());
  EXPECT_NEAR(*r.p_star, 0.5, 1e-12);
  const auto q = quantum_payoffs(kPd, EntanglementParam(0.5));
  for (double x0 : {0.05, 0.3, 0.7, 0.95}) {
    EXPECT_NEAR(oracle::replicator_limit(q.rq, q.sq, q.tq, q.pq, x0), *r.p_star, 1e-9) << "x0=" << x0;
  }
}

TEST(EssRegime, MixedPStarAgreesWithReplicatorAcrossBand) {
  for (int i = 34; i <= 66; i += 4) {
    const double b2 = i / 100.0;
    const auto q = quantum_payoffs(kPd, EntanglementParam(b2));
    const auto r = ess_regime(q);
    ASSERT_EQ(r.kind, EssKind::MixedESS) << b2;
    EXPECT_NEAR(oracle::replicator_limit(q.rq, q.sq, q.tq, q.pq, 0.5, 3000.0), *r.p_star, 1e-8) << b2;
  }
}

TEST(EssRegime, RegimeBoundariesForStandardPd) {
  for (int i = 0; i <= 100; ++i) {
    const double b2 = i / 100.0;
    const auto kind = ess_regime(kPd, EntanglementParam(b2)).kind;
    if (b2 <= 1.0 / 3.0 - 1e-9) {
      EXPECT_EQ(kind, EssKind::DefectionESS) << b2;
    } else if (b2 >= 2.0 / 3.0 + 1e-9) {
      EXPECT_EQ(kind, EssKind::CooperationESS) << b2;
    } else {
      EXPECT_EQ(kind, EssKind::MixedESS) << b2;
    }
  }
}

TEST(EssRegime, ExactBoundariesResolvedByInvasionCondition) {
  // At 1/3 defection is only weakly better against defectors but strictly
  // better against cooperators; replicator from a small cooperator share
  // drifts to 0.
  const auto lo = quantum_payoffs(kPd, EntanglementParam(1.0 / 3.0));
  EXPECT_EQ(ess_regime(lo).kind, EssKind::DefectionESS);
  EXPECT_LT(oracle::replicator_limit(lo.rq, lo.sq, lo.tq, lo.pq, 0.05, 2000.0), 1e-3);
  const auto hi = quantum_payoffs(kPd, EntanglementParam(2.0 / 3.0));
  EXPECT_EQ(ess_regime(hi).kind, EssKind::CooperationESS);
  EXPECT_GT(oracle::replicator_limit(hi.rq, hi.sq, hi.tq, hi.pq, 0.95, 2000.0), 1 - 1e-3);
}

TEST(EssRegime, DegenerateQuadHasNoRegime) {
  EXPECT_THROW(ess_regime(PayoffQuad{1, 1, 1, 1}, EntanglementParam(0.3)), DomainError);
}

TEST(EssRegime, StagHuntIsBistable) {
  // R > T >= P > S: both pure strategies resist invasion.
  const auto r = ess_regime(PayoffQuad{4, 0, 3, 1}, EntanglementParam(0.0));
  EXPECT_EQ(r.kind, EssKind::Bistable);
  ASSERT_TRUE(r.threshold.has_value());
  EXPECT_NEAR(*r.threshold, 0.5, 1e-12);
  EXPECT_LT(oracle::replicator_limit(4, 0, 3, 1, 0.45), 1e-6);
  EXPECT_GT(oracle::replicator_limit(4, 0, 3, 1, 0.55), 1 - 1e-6);
}

// ---------- mixed_entanglement ----------

TEST(MixedEntanglement, Examples) {
  EXPECT_DOUBLE_EQ(mixed_entanglement(EntanglementParam(0.0), EntanglementParam(0.52)).value(), 0.26);
  EXPECT_DOUBLE_EQ(mixed_entanglement(EntanglementParam(0.5), EntanglementParam(0.5)).value(), 0.5);
  EXPECT_DOUBLE_EQ(mixed_entanglement(EntanglementParam(1.0), EntanglementParam(0.52)).value(), 0.76);
}

TEST(MixedEntanglement, SymmetricExactly) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const EntanglementParam x(u(rng)), y(u(rng));
    EXPECT_EQ(mixed_entanglement(x, y).value(), mixed_entanglement(y, x).value());
  }
}
