#pragma once

// Spatial evolutionary engine: a toroidal lattice of (strategy, vehicle type)
// agents playing the quantum-blended lane-change game with their Moore
// neighbourhood and imitating same-type neighbours through the Fermi rule.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qlane/game.hpp"
#include "qlane/quantum.hpp"
#include "qlane/random.hpp"

namespace qlane {

enum class Strategy : std::uint8_t { Cooperate = 0, Defect = 1 };

struct Agent {
  Strategy strategy = Strategy::Cooperate;
  VehicleType vtype = VehicleType::HDV;

  bool operator==(const Agent&) const = default;
};

struct Position {
  int row = 0;
  int col = 0;
  bool operator==(const Position&) const = default;
};

class Grid {
 public:
  Grid() = default;
  explicit Grid(int side, Agent fill = {});

  int side() const { return side_; }
  std::size_t cell_count() const { return cells_.size(); }

  Agent& at(Position p) { return cells_[index(p)]; }
  const Agent& at(Position p) const { return cells_[index(p)]; }
  std::span<Agent> cells() { return cells_; }
  std::span<const Agent> cells() const { return cells_; }

  std::size_t index(Position p) const {
    return static_cast<std::size_t>(p.row) * static_cast<std::size_t>(side_) + static_cast<std::size_t>(p.col);
  }
  Position position(std::size_t i) const {
    return {static_cast<int>(i / static_cast<std::size_t>(side_)), static_cast<int>(i % static_cast<std::size_t>(side_))};
  }

  bool operator==(const Grid&) const = default;

 private:
  int side_ = 0;
  std::vector<Agent> cells_;
};

struct SimParams {
  int side = 20;
  double mpr = 0.0;
  int d = 2;          // Moore neighbourhood radius
  double K = 2.0;     // Fermi noise
  double s = 0.02;    // social contact frequency; shuffles per step; period round(1/s)
  int t_max = 200;
  double b2_hdv = 0.52;
  double b2_av = 0.0;
  double init_coop_av = 0.5;
  double init_coop_hdv = 0.42;
  std::uint64_t seed = 0;

  // Throws ConfigError on out-of-range values, including a neighbourhood
  // that would wrap onto itself (2d + 1 > side).
  void validate() const;

  // Shuffle period in steps, or nullopt when s == 0.
  std::optional<int> shuffle_period() const;

  double init_coop(VehicleType v) const { return v == VehicleType::AV ? init_coop_av : init_coop_hdv; }
  double b2(VehicleType v) const { return v == VehicleType::AV ? b2_av : b2_hdv; }

  bool operator==(const SimParams&) const = default;
};

// Independent random streams of one run, all derived from the master seed.
struct SimStreams {
  explicit SimStreams(std::uint64_t seed);

  RandomStream init;
  RandomStream states;
  RandomStream neighbours;
  RandomStream adoption;
  RandomStream shuffle;
};

/// Each cell is AV with probability mpr, then cooperates with probability
/// init_coop[type].
Grid init_grid(const SimParams& params, RandomStream& rng);

/// Same-type pairs use that type's |b|^2; mixed pairs the mean of both.
EntanglementParam effective_b2(VehicleType self, VehicleType opp, const SimParams& params);

/// Cells within Chebyshev distance d on the torus, excluding `pos`, in
/// row-major offset order. Throws ConfigError when 2d + 1 > side.
std::vector<Position> neighbors(const Grid& grid, Position pos, int d);

class QuantumPayoffCache {
 public:
  QuantumPayoffCache() = default;
  explicit QuantumPayoffCache(std::size_t n_states);

  const QuantumPayoffQuad& at(std::size_t state, Role r, VehicleType self, VehicleType opp) const {
    return quads_[slot(state, r, self, opp)];
  }
  void set(std::size_t state, Role r, VehicleType self, VehicleType opp, const QuantumPayoffQuad& q) {
    quads_[slot(state, r, self, opp)] = q;
  }
  std::size_t size() const { return quads_.size(); }
  std::size_t n_states() const { return quads_.size() / 8; }

 private:
  static std::size_t slot(std::size_t state, Role r, VehicleType self, VehicleType opp) {
    return state * 8 + static_cast<std::size_t>(r) * 4 + static_cast<std::size_t>(self) * 2 +
           static_cast<std::size_t>(opp);
  }
  std::vector<QuantumPayoffQuad> quads_;
};

/// quantum_payoffs of every table quad at the pair's effective |b|^2.
QuantumPayoffCache build_cache(const PayoffTable& table, const SimParams& params);

/// Mean over neighbours of the pairwise payoff to the agent at `pos`. Each
/// pairwise payoff averages the agent's payoff as active and as passive.
double agent_payoff(const Grid& grid, Position pos, std::size_t state, const QuantumPayoffCache& cache, int d);

/// 1 / (1 + exp(-(e_y - e_x) / K)). Throws DomainError when K <= 0.
double fermi(double e_y, double e_x, double K);

/// One synchronous round: payoffs for every cell against the current grid,
/// then every cell imitates a random same-type neighbour with probability
/// fermi(E_Y, E_X, K) using pre-update strategies.
Grid step(const Grid& grid, std::size_t state, const QuantumPayoffCache& cache, const SimParams& params,
          SimStreams& streams);

/// Uniform random permutation of agent positions.
void shuffle_positions(Grid& grid, RandomStream& rng);

struct CooperationRatios {
  double av = 0.0;   // NaN when no AVs are present
  double hdv = 0.0;  // NaN when no HDVs are present
  double all = 0.0;

  bool operator==(const CooperationRatios&) const = default;
};

struct TypeCounts {
  std::size_t av = 0;
  std::size_t hdv = 0;
  std::size_t av_coop = 0;
  std::size_t hdv_coop = 0;
};

TypeCounts count_types(const Grid& grid);
CooperationRatios cooperation_ratios(const Grid& grid);

struct RunRecord {
  SimParams params;
  CooperationRatios initial;
  std::vector<CooperationRatios> series;  // t = 1 .. t_max
  std::size_t n_av = 0;
  std::size_t n_hdv = 0;
  std::vector<std::size_t> state_draws;  // state index used at each step
  std::string table_provenance;
  std::string table_digest;
};

/// Full evolutionary run. Deterministic for a fixed params.seed.
RunRecord run(const SimParams& params, const PayoffTable& table);
RunRecord run(const SimParams& params, const PayoffTable& table, const QuantumPayoffCache& cache);

// Tabular text: '#' metadata line with a JSON object, then
// t,coop_av,coop_hdv,coop_all with t = 0 holding the initial snapshot.
std::string serialize_run(const RunRecord& record);

}  // namespace qlane
