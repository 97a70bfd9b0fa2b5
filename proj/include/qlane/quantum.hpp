#pragma once

// Two-qubit Marinatto-Weber machinery: entangled initial state, the
// {I, sigma_x} strategy set, diagonal payoff operators and the closed-form
// quantum payoff blend that the lattice engine consumes.

#include <array>
#include <complex>
#include <optional>
#include <string_view>

namespace qlane {

using Amplitude = std::complex<double>;

// Basis order: |00>, |01>, |10>, |11>. The first qubit belongs to the
// active (row) player, the second to the passive (column) player.
struct TwoQubitState {
  std::array<Amplitude, 4> amps{};

  double norm_squared() const;
  bool operator==(const TwoQubitState&) const = default;
};

enum class StrategyOperator { Identity, PauliX };

inline constexpr StrategyOperator kCooperate = StrategyOperator::Identity;
inline constexpr StrategyOperator kDefect = StrategyOperator::PauliX;

// Diagonal operator in the computational basis; diag[i] is the payoff the
// player receives when the measured outcome is basis state i.
struct PayoffOperator {
  std::array<double, 4> diag{};
};

// |b|^2 in [0, 1]. Construction validates the range.
class EntanglementParam {
 public:
  constexpr EntanglementParam() = default;
  explicit EntanglementParam(double b2);

  constexpr double value() const { return b2_; }
  constexpr double complement() const { return 1.0 - b2_; }

  friend constexpr bool operator==(EntanglementParam, EntanglementParam) = default;

 private:
  double b2_ = 0.0;
};

// Classical (R, S, T, P) from the point of view of one player.
struct PayoffQuad {
  double r = 0.0;
  double s = 0.0;
  double t = 0.0;
  double p = 0.0;

  bool operator==(const PayoffQuad&) const = default;
};

// (R^q, S^q, T^q, P^q): expected payoff for (C,C), (C,D), (D,C), (D,D)
// once entanglement has blended the classical outcomes.
struct QuantumPayoffQuad {
  double rq = 0.0;
  double sq = 0.0;
  double tq = 0.0;
  double pq = 0.0;

  bool operator==(const QuantumPayoffQuad&) const = default;

  // Payoff to a player choosing `self` against an opponent choosing `other`.
  double against(StrategyOperator self, StrategyOperator other) const {
    if (self == kCooperate) return other == kCooperate ? rq : sq;
    return other == kCooperate ? tq : pq;
  }
};

enum class EssKind {
  DefectionESS,
  MixedESS,
  CooperationESS,
  // Both pure strategies are ESS (coordination games such as Stag Hunt).
  // Never produced for a strict Prisoner's Dilemma.
  Bistable,
};

struct EssRegime {
  EssKind kind = EssKind::DefectionESS;
  // Cooperation probability of the interior ESS; set iff kind == MixedESS.
  std::optional<double> p_star;
  // Unstable interior threshold separating the basins; set iff Bistable.
  std::optional<double> threshold;
};

std::string_view to_string(EssKind kind);
std::string_view to_string(StrategyOperator op);

/// a|00> + b|11> with a = sqrt(1 - b2), b = sqrt(b2), both real and
/// non-negative. Throws DomainError when b2 is outside [0, 1].
TwoQubitState make_initial_state(double b2);
TwoQubitState make_initial_state(EntanglementParam b2);

/// (U_active (x) U_passive)|state>. Throws DomainError on an unnormalized state.
TwoQubitState apply_strategies(const TwoQubitState& state, StrategyOperator u_active,
                               StrategyOperator u_passive);

/// <state| op |state>. Throws DomainError when the norm deviates by more
/// than 1e-9.
double expected_payoff(const TwoQubitState& state, const PayoffOperator& op);

// Payoff operators for the active (first qubit) and passive (second qubit)
// player of a symmetric game described by `quad` from each player's own view.
PayoffOperator active_payoff_operator(const PayoffQuad& quad);
PayoffOperator passive_payoff_operator(const PayoffQuad& quad);

QuantumPayoffQuad quantum_payoffs(const PayoffQuad& classical, EntanglementParam b2);

/// Evolutionary stability of {I, sigma_x} in the symmetric game defined by
/// the quantum quad. Boundaries come out of the stability conditions, with
/// payoff differences below 1e-12 (relative to the payoff scale) treated as
/// ties. Throws DomainError("no unique regime") when cooperating and
/// defecting earn the same payoff against every opponent mix.
EssRegime ess_regime(const QuantumPayoffQuad& quantum);
EssRegime ess_regime(const PayoffQuad& classical, EntanglementParam b2);

EntanglementParam mixed_entanglement(EntanglementParam first, EntanglementParam second);

}  // namespace qlane
