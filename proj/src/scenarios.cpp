#include "qlane/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qlane/calibration.hpp"
#include "qlane/errors.hpp"
#include "qlane/parallel.hpp"
#include "qlane/table_io.hpp"

namespace qlane {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string_view to_string(AvProfile p) {
  switch (p) {
    case AvProfile::Classical: return "classical";
    case AvProfile::Entangled: return "entangled";
    case AvProfile::Inverted: return "inverted";
  }
  return "?";
}

AvProfile parse_profile(std::string_view s) {
  for (auto p : kAvProfiles) {
    if (to_string(p) == s) return p;
  }
  throw ConfigError("unknown AV profile '" + std::string(s) + "'");
}

SimParams scenario_base_params() {
  SimParams p;
  p.side = 20;
  p.d = 2;
  p.K = 2.0;
  p.t_max = 200;
  p.b2_hdv = 0.52;
  return p;
}

SeriesStat summarize(const std::vector<double>& values) {
  std::vector<double> defined;
  defined.reserve(values.size());
  for (double v : values) {
    if (!std::isnan(v)) defined.push_back(v);
  }
  SeriesStat out;
  out.n = static_cast<int>(defined.size());
  if (defined.empty()) {
    out.mean = kNaN;
    out.ci = kNaN;
  } else if (defined.size() == 1) {
    out.mean = defined.front();
    out.ci = kNaN;
  } else {
    const MeanCi m = mean_ci95(defined);
    out.mean = m.mean;
    out.ci = m.half_width;
  }
  return out;
}

std::uint64_t scenario_seed(std::uint64_t master, AvProfile p, double mpr, double s, int rep) {
  return derive_seed(master, "scenario|" + std::string(to_string(p)) + "|mpr=" + format_double(mpr) +
                                 "|s=" + format_double(s) + "|rep=" + std::to_string(rep));
}

std::vector<ScenarioPanel> run_scenario(const ScenarioSpec& spec, const PayoffTable& table, std::size_t jobs) {
  if (spec.n_replicates < 1) throw ConfigError("n_replicates must be >= 1");
  if (table.empty()) throw ConfigError("payoff table is empty");

  std::vector<ScenarioPanel> panels;
  for (double mpr : spec.mprs) {
    for (double s : spec.s_values) {
      ScenarioPanel panel;
      panel.profile = spec.profile;
      panel.mpr = mpr;
      panel.s = s;
      panel.records.resize(static_cast<std::size_t>(spec.n_replicates));
      panels.push_back(std::move(panel));
    }
  }
  // Validate every configuration before spending time on runs.
  for (const auto& panel : panels) {
    SimParams p = spec.base;
    p.mpr = panel.mpr;
    p.s = panel.s;
    p.b2_av = profile_b2(spec.profile);
    p.validate();
  }

  const std::size_t reps = static_cast<std::size_t>(spec.n_replicates);
  parallel_for(panels.size() * reps, jobs, [&](std::size_t k) {
    auto& panel = panels[k / reps];
    const int rep = static_cast<int>(k % reps);
    SimParams p = spec.base;
    p.mpr = panel.mpr;
    p.s = panel.s;
    p.b2_av = profile_b2(spec.profile);
    p.seed = spec.identical_seeds ? spec.base.seed : scenario_seed(spec.base.seed, spec.profile, panel.mpr, panel.s, rep);
    panel.records[static_cast<std::size_t>(rep)] = run(p, table);
  });

  for (auto& panel : panels) {
    const int t_max = spec.base.t_max;
    panel.rows.reserve(static_cast<std::size_t>(t_max) + 1);
    std::vector<double> av(reps), hdv(reps), all(reps);
    for (int t = 0; t <= t_max; ++t) {
      for (std::size_t r = 0; r < reps; ++r) {
        const auto& rec = panel.records[r];
        const CooperationRatios& c = t == 0 ? rec.initial : rec.series[static_cast<std::size_t>(t - 1)];
        av[r] = c.av;
        hdv[r] = c.hdv;
        all[r] = c.all;
      }
      panel.rows.push_back({t, summarize(av), summarize(hdv), summarize(all)});
    }
  }
  return panels;
}

std::string_view to_string(SensitivityAxis a) {
  switch (a) {
    case SensitivityAxis::D: return "d";
    case SensitivityAxis::K: return "K";
    case SensitivityAxis::S: return "s";
    case SensitivityAxis::Mpr: return "mpr";
  }
  return "?";
}

SensitivityAxis parse_axis(std::string_view s) {
  for (auto a : {SensitivityAxis::D, SensitivityAxis::K, SensitivityAxis::S, SensitivityAxis::Mpr}) {
    if (to_string(a) == s) return a;
  }
  throw ConfigError("unknown sensitivity axis '" + std::string(s) + "'");
}

std::vector<double> default_axis_values(SensitivityAxis a) {
  switch (a) {
    case SensitivityAxis::D: return {1, 2, 3};
    case SensitivityAxis::K: return {1, 2, 3};
    case SensitivityAxis::S: return {0.00, 0.02, 0.04};
    case SensitivityAxis::Mpr: return {0.2, 0.5, 0.8};
  }
  return {};
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const double h = std::clamp((n + 1.0 / 3.0) * p + 1.0 / 3.0, 1.0, n);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - std::floor(h);
  if (lo >= values.size()) return values.back();
  return values[lo - 1] + frac * (values[lo] - values[lo - 1]);
}

DistributionSummary box_stats(double value, const std::vector<double>& samples) {
  if (samples.empty()) throw DomainError("box statistics need at least one sample");
  DistributionSummary d;
  d.value = value;
  d.min = *std::min_element(samples.begin(), samples.end());
  d.max = *std::max_element(samples.begin(), samples.end());
  d.q1 = quantile(samples, 0.25);
  d.median = quantile(samples, 0.5);
  d.q3 = quantile(samples, 0.75);
  d.n = static_cast<int>(samples.size());
  return d;
}

std::uint64_t sensitivity_seed(std::uint64_t master, AvProfile p, SensitivityAxis axis, double value, int rep) {
  return derive_seed(master, "sensitivity|" + std::string(to_string(p)) + "|" + std::string(to_string(axis)) +
                                 "=" + format_double(value) + "|rep=" + std::to_string(rep));
}

SimParams apply_axis(SimParams params, SensitivityAxis axis, double value) {
  switch (axis) {
    case SensitivityAxis::D:
      if (value != std::floor(value)) throw ConfigError("d must be an integer");
      params.d = static_cast<int>(value);
      break;
    case SensitivityAxis::K: params.K = value; break;
    case SensitivityAxis::S: params.s = value; break;
    case SensitivityAxis::Mpr: params.mpr = value; break;
  }
  return params;
}

std::vector<DistributionSummary> run_sensitivity(const SensitivitySpec& spec, const PayoffTable& table,
                                                 AvProfile profile, std::size_t jobs) {
  if (spec.n_replicates < 1) throw ConfigError("n_replicates must be >= 1");
  if (spec.window < 1 || spec.window > spec.base.t_max) throw ConfigError("window must lie in [1, t_max]");
  if (table.empty()) throw ConfigError("payoff table is empty");
  for (double v : spec.values) apply_axis(spec.base, spec.axis, v).validate();

  const std::size_t reps = static_cast<std::size_t>(spec.n_replicates);
  std::vector<double> estimates(spec.values.size() * reps);
  parallel_for(estimates.size(), jobs, [&](std::size_t k) {
    const double value = spec.values[k / reps];
    const int rep = static_cast<int>(k % reps);
    SimParams p = apply_axis(spec.base, spec.axis, value);
    p.b2_av = profile_b2(profile);
    p.seed = spec.identical_seeds ? spec.base.seed : sensitivity_seed(spec.base.seed, profile, spec.axis, value, rep);
    estimates[k] = equilibrium_estimate(run(p, table), spec.window);
  });

  std::vector<DistributionSummary> out;
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    std::vector<double> samples(estimates.begin() + static_cast<std::ptrdiff_t>(i * reps),
                                estimates.begin() + static_cast<std::ptrdiff_t>((i + 1) * reps));
    out.push_back(box_stats(spec.values[i], samples));
  }
  return out;
}

std::string panel_file_name(const ScenarioPanel& panel) {
  return "scenario_" + std::string(to_string(panel.profile)) + "_mpr" + short_number(panel.mpr) + "_s" +
         short_number(panel.s) + ".csv";
}

std::string sensitivity_file_name(AvProfile profile, SensitivityAxis axis) {
  return "sensitivity_" + std::string(to_string(profile)) + "_" + std::string(to_string(axis)) + ".csv";
}

std::string serialize_panel(const ScenarioPanel& panel) {
  std::string out = "t,av_mean,av_ci,av_n,hdv_mean,hdv_ci,hdv_n,all_mean,all_ci,all_n\n";
  for (const auto& row : panel.rows) {
    out += std::to_string(row.t);
    for (const SeriesStat* s : {&row.av, &row.hdv, &row.all}) {
      out += "," + format_double(s->mean) + "," + format_double(s->ci) + "," + std::to_string(s->n);
    }
    out += "\n";
  }
  return out;
}

std::string serialize_sensitivity(const std::vector<DistributionSummary>& rows) {
  std::string out = "value,min,q1,median,q3,max,n\n";
  for (const auto& r : rows) {
    out += format_double(r.value) + "," + format_double(r.min) + "," + format_double(r.q1) + "," +
           format_double(r.median) + "," + format_double(r.q3) + "," + format_double(r.max) + "," +
           std::to_string(r.n) + "\n";
  }
  return out;
}

}  // namespace qlane
