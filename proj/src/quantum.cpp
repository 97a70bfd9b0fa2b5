#include "qlane/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qlane/errors.hpp"

namespace qlane {

namespace {

constexpr double kNormTolerance = 1e-9;

void require_normalized(const TwoQubitState& state) {
  const double n2 = state.norm_squared();
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > kNormTolerance) {
    throw DomainError("two-qubit state is not normalized (|psi|^2 = " + std::to_string(n2) + ")");
  }
}

// Index of the single-qubit basis state a strategy maps `bit` onto.
constexpr int apply_bit(StrategyOperator op, int bit) {
  return op == StrategyOperator::PauliX ? bit ^ 1 : bit;
}

}  // namespace

double TwoQubitState::norm_squared() const {
  double total = 0.0;
  for (const auto& a : amps) total += std::norm(a);
  return total;
}

EntanglementParam::EntanglementParam(double b2) : b2_(b2) {
  if (!(b2 >= 0.0 && b2 <= 1.0)) {
    throw DomainError("entanglement |b|^2 must lie in [0, 1], got " + std::to_string(b2));
  }
}

std::string_view to_string(EssKind kind) {
  switch (kind) {
    case EssKind::DefectionESS: return "DefectionESS";
    case EssKind::MixedESS: return "MixedESS";
    case EssKind::CooperationESS: return "CooperationESS";
    case EssKind::Bistable: return "Bistable";
  }
  return "?";
}

std::string_view to_string(StrategyOperator op) {
  return op == StrategyOperator::Identity ? "I" : "X";
}

TwoQubitState make_initial_state(double b2) { return make_initial_state(EntanglementParam(b2)); }

TwoQubitState make_initial_state(EntanglementParam b2) {
  TwoQubitState st;
  st.amps[0] = std::sqrt(b2.complement());
  st.amps[3] = std::sqrt(b2.value());
  return st;
}

TwoQubitState apply_strategies(const TwoQubitState& state, StrategyOperator u_active,
                               StrategyOperator u_passive) {
  require_normalized(state);
  TwoQubitState out;
  for (int first = 0; first < 2; ++first) {
    for (int second = 0; second < 2; ++second) {
      const int to = (apply_bit(u_active, first) << 1) | apply_bit(u_passive, second);
      out.amps[to] = state.amps[(first << 1) | second];
    }
  }
  return out;
}

double expected_payoff(const TwoQubitState& state, const PayoffOperator& op) {
  require_normalized(state);
  double total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) total += op.diag[i] * std::norm(state.amps[i]);
  return total;
}

PayoffOperator active_payoff_operator(const PayoffQuad& q) { return {{q.r, q.s, q.t, q.p}}; }

PayoffOperator passive_payoff_operator(const PayoffQuad& q) { return {{q.r, q.t, q.s, q.p}}; }

QuantumPayoffQuad quantum_payoffs(const PayoffQuad& c, EntanglementParam b2) {
  const double w = b2.value();
  const double keep = b2.complement();
  return {
      c.r * keep + c.p * w,
      c.s * keep + c.t * w,
      c.t * keep + c.s * w,
      c.p * keep + c.r * w,
  };
}

EssRegime ess_regime(const QuantumPayoffQuad& q) {
  // Advantage of cooperating over defecting against a cooperator (vs_c) and
  // against a defector (vs_d). Against a population cooperating with
  // probability x the advantage is vs_d + x * (vs_c - vs_d).
  const double scale = std::max({std::abs(q.rq), std::abs(q.sq), std::abs(q.tq), std::abs(q.pq), 1.0});
  const double eps = 1e-12 * scale;
  auto sign = [eps](double v) { return v > eps ? 1 : (v < -eps ? -1 : 0); };

  const double vs_c = q.rq - q.tq;
  const double vs_d = q.sq - q.pq;
  const int sc = sign(vs_c);
  const int sd = sign(vs_d);

  if (sc == 0 && sd == 0) {
    throw DomainError("no unique regime: cooperation and defection are payoff-equivalent");
  }

  // Maynard Smith conditions, with weak dominance resolved by the second
  // (invasion) condition.
  const bool defect_ess = sd < 0 || (sd == 0 && sc < 0);
  const bool coop_ess = sc > 0 || (sc == 0 && sd > 0);

  EssRegime out;
  if (defect_ess && coop_ess) {
    out.kind = EssKind::Bistable;
    out.threshold = vs_d / (vs_d - vs_c);
  } else if (defect_ess) {
    out.kind = EssKind::DefectionESS;
  } else if (coop_ess) {
    out.kind = EssKind::CooperationESS;
  } else {
    // sd > 0 and sc < 0: stable interior rest point.
    out.kind = EssKind::MixedESS;
    out.p_star = vs_d / (vs_d - vs_c);
  }
  return out;
}

EssRegime ess_regime(const PayoffQuad& classical, EntanglementParam b2) {
  return ess_regime(quantum_payoffs(classical, b2));
}

EntanglementParam mixed_entanglement(EntanglementParam first, EntanglementParam second) {
  return EntanglementParam((first.value() + second.value()) / 2.0);
}

}  // namespace qlane
