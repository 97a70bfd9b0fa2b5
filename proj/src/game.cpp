#include "qlane/game.hpp"

#include <cmath>
#include <string>

#include "qlane/errors.hpp"
#include "qlane/random.hpp"

namespace qlane {

std::string_view to_string(Role r) { return r == Role::Active ? "active" : "passive"; }

std::string_view to_string(VehicleType v) { return v == VehicleType::AV ? "AV" : "HDV"; }

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::CC: return "CC";
    case Outcome::CD: return "CD";
    case Outcome::DC: return "DC";
    case Outcome::DD: return "DD";
  }
  return "?";
}

std::string_view to_string(GameClass g) {
  switch (g) {
    case GameClass::PrisonersDilemma: return "PrisonersDilemma";
    case GameClass::StagHunt: return "StagHunt";
    case GameClass::Chicken: return "Chicken";
    case GameClass::Harmony: return "Harmony";
    case GameClass::Other: return "Other";
  }
  return "?";
}

Role parse_role(std::string_view s) {
  if (s == "active") return Role::Active;
  if (s == "passive") return Role::Passive;
  throw ParseError("unknown role '" + std::string(s) + "'");
}

VehicleType parse_vehicle_type(std::string_view s) {
  if (s == "AV") return VehicleType::AV;
  if (s == "HDV") return VehicleType::HDV;
  throw ParseError("unknown vehicle type '" + std::string(s) + "'");
}

Outcome parse_outcome(std::string_view s) {
  for (auto o : kOutcomes) {
    if (to_string(o) == s) return o;
  }
  throw ParseError("unknown outcome '" + std::string(s) + "'");
}

void StandardizationStats::validate() const {
  for (std::size_t i = 0; i < kStateDim; ++i) {
    if (!std::isfinite(mean[i]) || !std::isfinite(std[i]) || !(std[i] > 0.0)) {
      throw ConfigError("standardization std for s" + std::to_string(i + 1) + " must be positive and finite");
    }
  }
}

FeatureVector standardize(const LaneChangeState& raw, const StandardizationStats& stats) {
  stats.validate();
  FeatureVector out{};
  out[0] = 1.0;
  for (std::size_t i = 0; i < kStateDim; ++i) {
    if (!std::isfinite(raw[i])) {
      throw DomainError("lane-change state component s" + std::to_string(i + 1) + " is not finite");
    }
    out[i + 1] = (raw[i] - stats.mean[i]) / stats.std[i];
  }
  return out;
}

double utility(std::span<const double> coeffs, std::span<const double> standardized) {
  if (coeffs.size() != standardized.size()) {
    throw DomainError("utility: coefficient length " + std::to_string(coeffs.size()) +
                      " != feature length " + std::to_string(standardized.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) total += coeffs[i] * standardized[i];
  return total;
}

UtilityCoefficients::UtilityCoefficients() {
  for (auto r : kRoles)
    for (auto t : kInteractionTypes)
      for (auto o : kOutcomes) beta_[{r, t, o}] = FeatureVector{};
}

const FeatureVector& UtilityCoefficients::at(Role r, InteractionType t, Outcome o) const {
  return beta_.at({r, t, o});
}

void UtilityCoefficients::set(Role r, InteractionType t, Outcome o, const FeatureVector& beta) {
  if (o == Outcome::DD) {
    for (double b : beta) {
      if (b != 0.0) throw DomainError("DD coefficients must be all zero (mutual-defection baseline)");
    }
  }
  beta_[{r, t, o}] = beta;
}

PayoffQuad quad_from_utilities(double u_cc, double u_cd, double u_dc, double u_dd, Role role) {
  if (u_dd != 0.0) throw DomainError("payoffs not DD-normalized");
  if (role == Role::Active) return {u_cc, u_cd, u_dc, 0.0};
  return {u_cc, u_dc, u_cd, 0.0};
}

GameClass classify(const PayoffQuad& q) {
  if (q.t > q.r && q.r > q.p && q.p > q.s) return GameClass::PrisonersDilemma;
  if (q.r > q.t && q.p > q.s && q.r > q.p) return GameClass::StagHunt;
  if (q.t > q.r && q.r > q.s && q.s > q.p) return GameClass::Chicken;
  if (q.r > q.t && q.s > q.p) return GameClass::Harmony;
  return GameClass::Other;
}

// ---------------------------------------------------------------------------
// PayoffTable

namespace {
constexpr std::size_t kSlotsPerState = 2 * 2 * 2;
}

PayoffTable::PayoffTable(std::vector<std::string> state_ids, Provenance provenance)
    : state_ids_(std::move(state_ids)),
      quads_(state_ids_.size() * kSlotsPerState),
      present_(state_ids_.size() * kSlotsPerState, 0),
      provenance_(provenance) {}

std::size_t PayoffTable::slot(std::size_t state, Role r, VehicleType self, VehicleType opp) {
  return state * kSlotsPerState + static_cast<std::size_t>(r) * 4 + static_cast<std::size_t>(self) * 2 +
         static_cast<std::size_t>(opp);
}

bool PayoffTable::has(std::size_t state, Role r, VehicleType self, VehicleType opp) const {
  return state < size() && present_[slot(state, r, self, opp)] != 0;
}

const PayoffQuad& PayoffTable::quad(std::size_t state, Role r, VehicleType self, VehicleType opp) const {
  if (!has(state, r, self, opp)) {
    throw CompletenessError("payoff table has no record for state " +
                            (state < size() ? state_ids_[state] : std::to_string(state)) + ", role " +
                            std::string(to_string(r)) + ", " + std::string(to_string(self)) + " vs " +
                            std::string(to_string(opp)));
  }
  return quads_[slot(state, r, self, opp)];
}

void PayoffTable::set(std::size_t state, Role r, VehicleType self, VehicleType opp, const PayoffQuad& q) {
  if (state >= size()) throw DomainError("state index out of range");
  if (!std::isfinite(q.r) || !std::isfinite(q.s) || !std::isfinite(q.t) || !std::isfinite(q.p)) {
    throw DomainError("payoff quad for state " + state_ids_[state] + " is not finite");
  }
  quads_[slot(state, r, self, opp)] = q;
  present_[slot(state, r, self, opp)] = 1;
}

void PayoffTable::check_complete() const {
  for (std::size_t i = 0; i < size(); ++i)
    for (auto r : kRoles)
      for (auto t : kInteractionTypes) (void)quad(i, r, t.self, t.opponent);
}

PayoffTable uniform_table(const PayoffQuad& quad, std::string state_id) {
  PayoffTable table({std::move(state_id)});
  for (auto r : kRoles)
    for (auto t : kInteractionTypes) table.set(0, r, t.self, t.opponent, quad);
  return table;
}

// ---------------------------------------------------------------------------
// Synthetic tables

SyntheticTableSpec SyntheticTableSpec::defaults() {
  SyntheticTableSpec spec;
  // s1..s11 (m/s, m/s, m/s^2, s, m/s, m/s, m/s^2, s, m/s, m/s, m/s^2)
  spec.feature_mean = {12.0, 0.8, 0.0, 2.0, 0.5, 0.8, 0.0, 2.0, 0.0, 0.8, 0.0};
  spec.feature_std = {4.0, 0.4, 0.5, 1.0, 2.0, 0.4, 0.5, 1.0, 2.0, 0.4, 0.5};
  // Mostly cooperation-favouring games with a tail of social dilemmas.
  // Active: S = U_CD, T = U_DC. Passive: S = U_DC, T = U_CD.
  spec.intercept_mean = {{{1.0, 0.4, 0.6}, {1.0, 0.6, 0.4}}};
  spec.intercept_std = 0.1;
  spec.weight_std = 0.12;
  spec.av_intercept_shift = 0.2;
  return spec;
}

SyntheticTableSpec SyntheticTableSpec::zero_coefficients() {
  SyntheticTableSpec spec;
  spec.feature_std.fill(1.0);
  return spec;
}

void SyntheticTableSpec::validate() const {
  for (std::size_t i = 0; i < kStateDim; ++i) {
    if (!std::isfinite(feature_mean[i]) || !std::isfinite(feature_std[i]) || !(feature_std[i] > 0.0)) {
      throw ConfigError("synthetic feature std for s" + std::to_string(i + 1) + " must be positive");
    }
  }
  if (!(intercept_std >= 0.0) || !(weight_std >= 0.0)) {
    throw ConfigError("coefficient prior std must be non-negative");
  }
}

namespace {

// Standard deviations and gaps cannot be negative.
constexpr std::array<bool, kStateDim> kNonNegative = {false, true, false, true, false, true,
                                                      false, true, false, true, false};

}  // namespace

SyntheticTable synth_table(std::size_t n_states, const SyntheticTableSpec& spec, std::uint64_t seed) {
  if (n_states == 0) throw ConfigError("n_states must be >= 1");
  spec.validate();

  RandomStream state_rng(seed, "synth/states");
  RandomStream coef_rng(seed, "synth/coefficients");

  SyntheticTable out;
  StandardizationStats stats{spec.feature_mean, spec.feature_std};

  for (auto r : kRoles) {
    for (auto t : kInteractionTypes) {
      for (std::size_t oi = 0; oi < 3; ++oi) {
        FeatureVector beta{};
        double mu = spec.intercept_mean[static_cast<std::size_t>(r)][oi];
        if (oi == 0 && t.self == VehicleType::AV) mu += spec.av_intercept_shift;
        beta[0] = coef_rng.normal(mu, spec.intercept_std);
        for (std::size_t k = 1; k < kFeatureDim; ++k) beta[k] = coef_rng.normal(0.0, spec.weight_std);
        out.coefficients.set(r, t, kOutcomes[oi], beta);
      }
    }
  }

  out.states.reserve(n_states);
  for (std::size_t i = 0; i < n_states; ++i) {
    LaneChangeState s{};
    for (std::size_t k = 0; k < kStateDim; ++k) {
      s[k] = state_rng.normal(spec.feature_mean[k], spec.feature_std[k]);
      if (kNonNegative[k] && s[k] < 0.0) s[k] = 0.0;
    }
    out.states.push_back(s);
  }

  out.table = table_from_coefficients(out.states, stats, out.coefficients,
                                      {PayoffTable::Provenance::Kind::Synthetic, seed});
  return out;
}

PayoffTable table_from_coefficients(std::span<const LaneChangeState> states, const StandardizationStats& stats,
                                    const UtilityCoefficients& coefficients, PayoffTable::Provenance provenance) {
  std::vector<std::string> ids;
  ids.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) ids.push_back("s" + std::to_string(i));
  PayoffTable table(std::move(ids), provenance);
  table.set_stats(stats);

  for (std::size_t i = 0; i < states.size(); ++i) {
    const FeatureVector x = standardize(states[i], stats);
    for (auto r : kRoles) {
      for (auto t : kInteractionTypes) {
        std::array<double, 4> u{};
        for (auto o : kOutcomes) u[static_cast<std::size_t>(o)] = utility(coefficients.at(r, t, o), x);
        table.set(i, r, t.self, t.opponent, quad_from_utilities(u[0], u[1], u[2], u[3], r));
      }
    }
  }
  return table;
}

ClassCounts class_distribution(const PayoffTable& table) {
  ClassCounts out;
  for (std::size_t i = 0; i < table.size(); ++i)
    for (auto r : kRoles)
      for (auto t : kInteractionTypes) {
        ++out.counts[classify(table.quad(i, r, t.self, t.opponent))];
        ++out.total;
      }
  return out;
}

}  // namespace qlane
