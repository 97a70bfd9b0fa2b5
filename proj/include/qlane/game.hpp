#pragma once

// Classical side of the lane-change game: state standardization, the linear
// utility model, role-dependent payoff mapping, game classification and
// payoff tables (synthesized or loaded).

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qlane/quantum.hpp"

namespace qlane {

enum class Role : std::uint8_t { Active = 0, Passive = 1 };
enum class VehicleType : std::uint8_t { AV = 0, HDV = 1 };
enum class Outcome : std::uint8_t { CC = 0, CD = 1, DC = 2, DD = 3 };

inline constexpr std::array kRoles{Role::Active, Role::Passive};
inline constexpr std::array kVehicleTypes{VehicleType::AV, VehicleType::HDV};
inline constexpr std::array kOutcomes{Outcome::CC, Outcome::CD, Outcome::DC, Outcome::DD};

struct InteractionType {
  VehicleType self = VehicleType::HDV;
  VehicleType opponent = VehicleType::HDV;

  auto operator<=>(const InteractionType&) const = default;
};

inline constexpr std::array kInteractionTypes{
    InteractionType{VehicleType::AV, VehicleType::HDV},
    InteractionType{VehicleType::HDV, VehicleType::AV},
    InteractionType{VehicleType::HDV, VehicleType::HDV},
    InteractionType{VehicleType::AV, VehicleType::AV},
};

std::string_view to_string(Role r);
std::string_view to_string(VehicleType v);
std::string_view to_string(Outcome o);
Role parse_role(std::string_view s);
VehicleType parse_vehicle_type(std::string_view s);
Outcome parse_outcome(std::string_view s);

inline constexpr std::size_t kStateDim = 11;
inline constexpr std::size_t kFeatureDim = kStateDim + 1;

// Kinematic snapshot right before a lane change: s1..s11.
// Indices 3 and 7 (s4, s8) are time gaps and must be non-negative.
using LaneChangeState = std::array<double, kStateDim>;
using FeatureVector = std::array<double, kFeatureDim>;

struct StandardizationStats {
  std::array<double, kStateDim> mean{};
  std::array<double, kStateDim> std{};

  // Throws ConfigError unless every std entry is positive and finite.
  void validate() const;
  bool operator==(const StandardizationStats&) const = default;
};

/// Leading 1 (intercept) followed by the z-scored state.
FeatureVector standardize(const LaneChangeState& raw, const StandardizationStats& stats);

/// beta . features. Throws DomainError if the lengths differ.
double utility(std::span<const double> coeffs, std::span<const double> standardized);

// beta_{r,t,o}; every key present, DD vectors all zero.
class UtilityCoefficients {
 public:
  struct Key {
    Role role;
    InteractionType type;
    Outcome outcome;
    auto operator<=>(const Key&) const = default;
  };

  // All-zero coefficients for every key.
  UtilityCoefficients();

  const FeatureVector& at(Role r, InteractionType t, Outcome o) const;
  // Throws DomainError when assigning a non-zero vector to DD.
  void set(Role r, InteractionType t, Outcome o, const FeatureVector& beta);

  bool operator==(const UtilityCoefficients&) const = default;

 private:
  std::map<Key, FeatureVector> beta_;
};

/// R = U_CC, P = U_DD = 0; active: S = U_CD, T = U_DC; passive: S = U_DC,
/// T = U_CD. Throws DomainError("payoffs not DD-normalized") if u_dd != 0.
PayoffQuad quad_from_utilities(double u_cc, double u_cd, double u_dc, double u_dd, Role role);

enum class GameClass { PrisonersDilemma, StagHunt, Chicken, Harmony, Other };

std::string_view to_string(GameClass g);
GameClass classify(const PayoffQuad& quad);

struct TableProvenance {
  enum class Kind { Loaded, Synthetic } kind = Kind::Loaded;
  std::uint64_t seed = 0;  // meaningful for Synthetic only
  bool operator==(const TableProvenance&) const = default;
};

// Per-state payoff quads keyed by (state, role, self type, opponent type).
class PayoffTable {
 public:
  using Provenance = TableProvenance;

  PayoffTable() = default;
  explicit PayoffTable(std::vector<std::string> state_ids, Provenance provenance = Provenance());

  std::size_t size() const { return state_ids_.size(); }
  bool empty() const { return state_ids_.empty(); }
  const std::vector<std::string>& state_ids() const { return state_ids_; }
  const Provenance& provenance() const { return provenance_; }
  void set_provenance(Provenance p) { provenance_ = p; }

  const std::optional<StandardizationStats>& stats() const { return stats_; }
  void set_stats(std::optional<StandardizationStats> s) { stats_ = std::move(s); }

  // Throws CompletenessError if the record was never assigned.
  const PayoffQuad& quad(std::size_t state, Role r, VehicleType self, VehicleType opp) const;
  bool has(std::size_t state, Role r, VehicleType self, VehicleType opp) const;
  void set(std::size_t state, Role r, VehicleType self, VehicleType opp, const PayoffQuad& q);

  // Throws CompletenessError naming the first missing record.
  void check_complete() const;

  bool operator==(const PayoffTable&) const = default;

 private:
  static std::size_t slot(std::size_t state, Role r, VehicleType self, VehicleType opp);

  std::vector<std::string> state_ids_;
  std::vector<PayoffQuad> quads_;
  std::vector<std::uint8_t> present_;
  Provenance provenance_;
  std::optional<StandardizationStats> stats_;
};

// Single-state table with the same quad for every role and type pair.
PayoffTable uniform_table(const PayoffQuad& quad, std::string state_id = "s0");

// Generator settings for a synthetic stand-in for empirical payoff tables.
// Raw state features are drawn from independent normals; the generating
// mean/std double as the standardization statistics.
struct SyntheticTableSpec {
  std::array<double, kStateDim> feature_mean{};
  std::array<double, kStateDim> feature_std{};

  // Coefficient prior per role and outcome (CC, CD, DC): intercept ~
  // N(intercept_mean, intercept_std), feature weights ~ N(0, weight_std).
  // The same prior applies to every interaction type, plus an additive
  // intercept shift for AV-self types.
  std::array<std::array<double, 3>, 2> intercept_mean{};
  double intercept_std = 0.0;
  double weight_std = 0.0;
  double av_intercept_shift = 0.0;

  static SyntheticTableSpec defaults();
  // Everything zero except unit feature spreads.
  static SyntheticTableSpec zero_coefficients();

  // Throws ConfigError on non-positive feature std or negative prior std.
  void validate() const;
};

struct SyntheticTable {
  PayoffTable table;
  UtilityCoefficients coefficients;
  std::vector<LaneChangeState> states;
};

/// Deterministic for a given (spec, seed). Quads come from
/// standardize -> utility -> quad_from_utilities.
SyntheticTable synth_table(std::size_t n_states, const SyntheticTableSpec& spec, std::uint64_t seed);

/// Evaluates every (state, role, type) quad through the utility model.
PayoffTable table_from_coefficients(std::span<const LaneChangeState> states, const StandardizationStats& stats,
                                    const UtilityCoefficients& coefficients, PayoffTable::Provenance provenance);

struct ClassCounts {
  std::map<GameClass, std::size_t> counts;
  std::size_t total = 0;
};

ClassCounts class_distribution(const PayoffTable& table);

}  // namespace qlane
