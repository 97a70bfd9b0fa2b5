#include "qlane/lattice.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qlane/config.hpp"
#include "qlane/errors.hpp"
#include "qlane/table_io.hpp"

namespace qlane {

namespace {

constexpr StrategyOperator as_operator(Strategy s) {
  return s == Strategy::Cooperate ? StrategyOperator::Identity : StrategyOperator::PauliX;
}

void require_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

void check_radius(int side, int d) {
  if (d < 1) throw ConfigError("neighbourhood radius d must be >= 1");
  if (2 * d + 1 > side) {
    throw ConfigError("neighbourhood radius d=" + std::to_string(d) + " wraps onto itself on a side-" +
                      std::to_string(side) + " grid");
  }
}

// Flat neighbour index table, row-major offsets per cell.
struct NeighbourTable {
  std::size_t per_cell = 0;
  std::vector<std::uint32_t> index;

  NeighbourTable(const Grid& grid, int d) {
    check_radius(grid.side(), d);
    const int n = grid.side();
    per_cell = static_cast<std::size_t>((2 * d + 1) * (2 * d + 1) - 1);
    index.reserve(grid.cell_count() * per_cell);
    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
      const Position p = grid.position(i);
      for (int dr = -d; dr <= d; ++dr) {
        for (int dc = -d; dc <= d; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const Position q{((p.row + dr) % n + n) % n, ((p.col + dc) % n + n) % n};
          index.push_back(static_cast<std::uint32_t>(grid.index(q)));
        }
      }
    }
  }

  std::span<const std::uint32_t> of(std::size_t cell) const {
    return {index.data() + cell * per_cell, per_cell};
  }
};

double pair_payoff(const Agent& x, const Agent& y, std::size_t state, const QuantumPayoffCache& cache) {
  const auto sx = as_operator(x.strategy);
  const auto sy = as_operator(y.strategy);
  const double as_active = cache.at(state, Role::Active, x.vtype, y.vtype).against(sx, sy);
  const double as_passive = cache.at(state, Role::Passive, x.vtype, y.vtype).against(sx, sy);
  return 0.5 * (as_active + as_passive);
}

double mean_payoff(const Grid& grid, std::size_t cell, std::span<const std::uint32_t> nbrs, std::size_t state,
                   const QuantumPayoffCache& cache) {
  const auto cells = grid.cells();
  double total = 0.0;
  for (auto j : nbrs) total += pair_payoff(cells[cell], cells[j], state, cache);
  return total / static_cast<double>(nbrs.size());
}

Grid step_with(const Grid& grid, const NeighbourTable& nt, std::size_t state, const QuantumPayoffCache& cache,
               const SimParams& params, SimStreams& streams) {
  const auto cells = grid.cells();
  const std::size_t n = cells.size();

  std::vector<double> payoff(n);
  for (std::size_t i = 0; i < n; ++i) payoff[i] = mean_payoff(grid, i, nt.of(i), state, cache);

  Grid next = grid;
  auto out = next.cells();
  std::vector<std::uint32_t> same_type;
  same_type.reserve(nt.per_cell);
  for (std::size_t i = 0; i < n; ++i) {
    same_type.clear();
    for (auto j : nt.of(i)) {
      if (cells[j].vtype == cells[i].vtype) same_type.push_back(j);
    }
    if (same_type.empty()) continue;
    const std::size_t y = same_type[streams.neighbours.index(same_type.size())];
    const double w = fermi(payoff[y], payoff[i], params.K);
    if (streams.adoption.bernoulli(w)) out[i].strategy = cells[y].strategy;
  }
  return next;
}

}  // namespace

Grid::Grid(int side, Agent fill) : side_(side) {
  if (side < 2) throw ConfigError("grid side must be >= 2");
  cells_.assign(static_cast<std::size_t>(side) * static_cast<std::size_t>(side), fill);
}

void SimParams::validate() const {
  if (side < 2) throw ConfigError("side must be >= 2");
  require_unit(mpr, "mpr");
  check_radius(side, d);
  if (!(K > 0.0) || !std::isfinite(K)) throw ConfigError("noise K must be positive");
  if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("social contact frequency s must be >= 0");
  if (t_max < 0) throw ConfigError("t_max must be >= 0");
  require_unit(b2_hdv, "b2_hdv");
  require_unit(b2_av, "b2_av");
  require_unit(init_coop_av, "init_coop_av");
  require_unit(init_coop_hdv, "init_coop_hdv");
}

std::optional<int> SimParams::shuffle_period() const {
  if (s <= 0.0) return std::nullopt;
  const double period = std::round(1.0 / s);
  if (period >= static_cast<double>(std::numeric_limits<int>::max())) return std::nullopt;
  return std::max(1, static_cast<int>(period));
}

SimStreams::SimStreams(std::uint64_t seed)
    : init(seed, "lattice/init"),
      states(seed, "lattice/states"),
      neighbours(seed, "lattice/neighbours"),
      adoption(seed, "lattice/adoption"),
      shuffle(seed, "lattice/shuffle") {}

Grid init_grid(const SimParams& params, RandomStream& rng) {
  params.validate();
  Grid grid(params.side);
  for (auto& a : grid.cells()) {
    a.vtype = rng.bernoulli(params.mpr) ? VehicleType::AV : VehicleType::HDV;
    a.strategy = rng.bernoulli(params.init_coop(a.vtype)) ? Strategy::Cooperate : Strategy::Defect;
  }
  return grid;
}

EntanglementParam effective_b2(VehicleType self, VehicleType opp, const SimParams& params) {
  if (self == opp) return EntanglementParam(params.b2(self));
  return mixed_entanglement(EntanglementParam(params.b2_av), EntanglementParam(params.b2_hdv));
}

std::vector<Position> neighbors(const Grid& grid, Position pos, int d) {
  check_radius(grid.side(), d);
  const int n = grid.side();
  std::vector<Position> out;
  out.reserve(static_cast<std::size_t>((2 * d + 1) * (2 * d + 1) - 1));
  for (int dr = -d; dr <= d; ++dr) {
    for (int dc = -d; dc <= d; ++dc) {
      if (dr == 0 && dc == 0) continue;
      out.push_back({((pos.row + dr) % n + n) % n, ((pos.col + dc) % n + n) % n});
    }
  }
  return out;
}

QuantumPayoffCache::QuantumPayoffCache(std::size_t n_states) : quads_(n_states * 8) {}

QuantumPayoffCache build_cache(const PayoffTable& table, const SimParams& params) {
  QuantumPayoffCache cache(table.size());
  for (std::size_t i = 0; i < table.size(); ++i)
    for (auto r : kRoles)
      for (auto self : kVehicleTypes)
        for (auto opp : kVehicleTypes) {
          cache.set(i, r, self, opp,
                    quantum_payoffs(table.quad(i, r, self, opp), effective_b2(self, opp, params)));
        }
  return cache;
}

double agent_payoff(const Grid& grid, Position pos, std::size_t state, const QuantumPayoffCache& cache, int d) {
  const auto nbrs = neighbors(grid, pos, d);
  const Agent& x = grid.at(pos);
  double total = 0.0;
  for (const auto& q : nbrs) total += pair_payoff(x, grid.at(q), state, cache);
  return total / static_cast<double>(nbrs.size());
}

double fermi(double e_y, double e_x, double K) {
  if (!(K > 0.0)) throw DomainError("Fermi noise K must be positive");
  return 1.0 / (1.0 + std::exp(-(e_y - e_x) / K));
}

Grid step(const Grid& grid, std::size_t state, const QuantumPayoffCache& cache, const SimParams& params,
          SimStreams& streams) {
  const NeighbourTable nt(grid, params.d);
  return step_with(grid, nt, state, cache, params, streams);
}

void shuffle_positions(Grid& grid, RandomStream& rng) { rng.shuffle(grid.cells()); }

TypeCounts count_types(const Grid& grid) {
  TypeCounts c;
  for (const auto& a : grid.cells()) {
    const bool coop = a.strategy == Strategy::Cooperate;
    if (a.vtype == VehicleType::AV) {
      ++c.av;
      c.av_coop += coop;
    } else {
      ++c.hdv;
      c.hdv_coop += coop;
    }
  }
  return c;
}

CooperationRatios cooperation_ratios(const Grid& grid) {
  const TypeCounts c = count_types(grid);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  CooperationRatios r;
  r.av = c.av ? static_cast<double>(c.av_coop) / static_cast<double>(c.av) : nan;
  r.hdv = c.hdv ? static_cast<double>(c.hdv_coop) / static_cast<double>(c.hdv) : nan;
  r.all = static_cast<double>(c.av_coop + c.hdv_coop) / static_cast<double>(c.av + c.hdv);
  return r;
}

RunRecord run(const SimParams& params, const PayoffTable& table) {
  params.validate();
  if (table.empty()) throw ConfigError("payoff table is empty");
  return run(params, table, build_cache(table, params));
}

RunRecord run(const SimParams& params, const PayoffTable& table, const QuantumPayoffCache& cache) {
  params.validate();
  if (table.empty()) throw ConfigError("payoff table is empty");
  if (cache.n_states() != table.size()) throw ConfigError("payoff cache does not match table");

  SimStreams streams(params.seed);
  Grid grid = init_grid(params, streams.init);
  const NeighbourTable nt(grid, params.d);
  const auto period = params.shuffle_period();

  RunRecord rec;
  rec.params = params;
  rec.table_provenance = table.provenance().kind == PayoffTable::Provenance::Kind::Synthetic
                             ? "synthetic:" + std::to_string(table.provenance().seed)
                             : "loaded";
  const TypeCounts counts = count_types(grid);
  rec.n_av = counts.av;
  rec.n_hdv = counts.hdv;
  rec.initial = cooperation_ratios(grid);
  rec.series.reserve(static_cast<std::size_t>(params.t_max));
  rec.state_draws.reserve(static_cast<std::size_t>(params.t_max));

  for (int t = 1; t <= params.t_max; ++t) {
    const std::size_t state = streams.states.index(table.size());
    rec.state_draws.push_back(state);
    grid = step_with(grid, nt, state, cache, params, streams);
    if (period && t % *period == 0) shuffle_positions(grid, streams.shuffle);
    rec.series.push_back(cooperation_ratios(grid));
  }
  return rec;
}

std::string serialize_run(const RunRecord& record) {
  nlohmann::json meta{{"params", to_json(record.params)},
                      {"seed", record.params.seed},
                      {"n_av", record.n_av},
                      {"n_hdv", record.n_hdv},
                      {"table_provenance", record.table_provenance},
                      {"table_digest", record.table_digest}};
  std::string out = "# " + meta.dump() + "\n";
  out += "t,coop_av,coop_hdv,coop_all\n";
  auto row = [&out](int t, const CooperationRatios& r) {
    out += std::to_string(t) + "," + format_double(r.av) + "," + format_double(r.hdv) + "," +
           format_double(r.all) + "\n";
  };
  row(0, record.initial);
  for (std::size_t i = 0; i < record.series.size(); ++i) row(static_cast<int>(i + 1), record.series[i]);
  return out;
}

}  // namespace qlane
