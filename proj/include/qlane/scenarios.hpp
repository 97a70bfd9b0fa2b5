#pragma once

// Experiment grids over AV behavioural profiles: time-series panels per
// (MPR, social contact frequency) and one-at-a-time sensitivity sweeps.
//
// Output file names:
//   scenario_<profile>_mpr<mpr>_s<s>.csv      one panel
//   sensitivity_<profile>_<axis>.csv          one sensitivity axis
// where numbers are printed with %g.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qlane/lattice.hpp"

namespace qlane {

enum class AvProfile { Classical, Entangled, Inverted };

inline constexpr std::array kAvProfiles{AvProfile::Classical, AvProfile::Entangled, AvProfile::Inverted};

constexpr double profile_b2(AvProfile p) {
  switch (p) {
    case AvProfile::Classical: return 0.0;
    case AvProfile::Entangled: return 0.5;
    case AvProfile::Inverted: return 1.0;
  }
  return 0.0;
}

std::string_view to_string(AvProfile p);
AvProfile parse_profile(std::string_view s);

// Base parameters shared by the scenario and sensitivity grids.
SimParams scenario_base_params();

struct ScenarioSpec {
  AvProfile profile = AvProfile::Classical;
  std::vector<double> mprs{0.2, 0.5, 0.8};
  std::vector<double> s_values{0.00, 0.04};
  int n_replicates = 20;
  SimParams base = scenario_base_params();
  bool identical_seeds = false;
};

struct SeriesStat {
  double mean = 0.0;  // NaN when no replicate has the type
  double ci = 0.0;    // NaN with fewer than two defined values
  int n = 0;          // replicates where the ratio is defined
};

struct PanelRow {
  int t = 0;
  SeriesStat av, hdv, all;
};

struct ScenarioPanel {
  AvProfile profile = AvProfile::Classical;
  double mpr = 0.0;
  double s = 0.0;
  std::vector<RunRecord> records;
  std::vector<PanelRow> rows;  // t = 0 .. t_max
};

SeriesStat summarize(const std::vector<double>& values);

std::uint64_t scenario_seed(std::uint64_t master, AvProfile p, double mpr, double s, int rep);

/// One panel per (mpr, s), in mprs-major order.
std::vector<ScenarioPanel> run_scenario(const ScenarioSpec& spec, const PayoffTable& table, std::size_t jobs = 1);

enum class SensitivityAxis { D, K, S, Mpr };

std::string_view to_string(SensitivityAxis a);
SensitivityAxis parse_axis(std::string_view s);
std::vector<double> default_axis_values(SensitivityAxis a);

struct SensitivitySpec {
  SensitivityAxis axis = SensitivityAxis::S;
  std::vector<double> values = default_axis_values(SensitivityAxis::S);
  int n_replicates = 20;
  int window = 50;
  // d=2, K=2, s=0.02, mpr=0.5 plus the scenario base.
  SimParams base = [] {
    SimParams p = scenario_base_params();
    p.d = 2;
    p.K = 2.0;
    p.s = 0.02;
    p.mpr = 0.5;
    return p;
  }();
  bool identical_seeds = false;
};

struct DistributionSummary {
  double value = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  int n = 0;
};

/// Quantile with the median-unbiased (Hyndman-Fan type 8) rule: position
/// h = (n + 1/3) p + 1/3 in 1-based order statistics, clamped to [1, n],
/// linearly interpolated between neighbours.
double quantile(std::vector<double> values, double p);
DistributionSummary box_stats(double value, const std::vector<double>& samples);

std::uint64_t sensitivity_seed(std::uint64_t master, AvProfile p, SensitivityAxis axis, double value, int rep);

SimParams apply_axis(SimParams params, SensitivityAxis axis, double value);

std::vector<DistributionSummary> run_sensitivity(const SensitivitySpec& spec, const PayoffTable& table,
                                                 AvProfile profile, std::size_t jobs = 1);

std::string panel_file_name(const ScenarioPanel& panel);
std::string sensitivity_file_name(AvProfile profile, SensitivityAxis axis);
std::string serialize_panel(const ScenarioPanel& panel);
std::string serialize_sensitivity(const std::vector<DistributionSummary>& rows);

}  // namespace qlane
