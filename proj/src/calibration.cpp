#include "qlane/calibration.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "qlane/errors.hpp"
#include "qlane/parallel.hpp"
#include "qlane/table_io.hpp"

namespace qlane {

NoCrossingError::NoCrossingError(double target, double curve_min, double curve_max)
    : std::runtime_error("no crossing: target " + format_double(target) + " outside curve range [" +
                         format_double(curve_min) + ", " + format_double(curve_max) + "]"),
      target_(target),
      min_(curve_min),
      max_(curve_max) {}

double equilibrium_estimate(const RunRecord& record, int window) {
  if (window < 1) throw DomainError("equilibrium window must be >= 1");
  const auto n = record.series.size();
  if (static_cast<std::size_t>(window) > n) {
    throw DomainError("equilibrium window " + std::to_string(window) + " exceeds series length " +
                      std::to_string(n));
  }
  double total = 0.0;
  for (std::size_t i = n - static_cast<std::size_t>(window); i < n; ++i) total += record.series[i].all;
  return total / window;
}

MeanCi mean_ci95(const std::vector<double>& values) {
  if (values.size() < 2) throw DomainError("a confidence interval needs at least 2 values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * sd / std::sqrt(n)};
}

std::uint64_t sweep_seed(std::uint64_t master, double b2, int rep) {
  return derive_seed(master, "calibrate|b2=" + format_double(b2) + "|rep=" + std::to_string(rep));
}

std::vector<SweepPoint> sweep(const std::vector<double>& b2_grid, SimParams params, const PayoffTable& table,
                              const SweepOptions& options) {
  if (options.n_replicates < 2) throw ConfigError("sweep needs n_replicates >= 2 to form a CI");
  if (!std::is_sorted(b2_grid.begin(), b2_grid.end())) throw ConfigError("b2 grid must be ascending");
  for (double b2 : b2_grid) EntanglementParam{b2};
  if (options.window > params.t_max) throw ConfigError("window exceeds t_max");
  params.mpr = 0.0;
  params.validate();
  if (table.empty()) throw ConfigError("payoff table is empty");

  const std::size_t reps = static_cast<std::size_t>(options.n_replicates);
  const std::size_t total = b2_grid.size() * reps;
  std::vector<double> estimates(total);
  std::vector<std::size_t> av_agents(total);

  parallel_for(total, options.jobs, [&](std::size_t k) {
    const std::size_t point = k / reps;
    const int rep = static_cast<int>(k % reps);
    SimParams p = params;
    p.b2_hdv = b2_grid[point];
    p.seed = options.identical_seeds ? params.seed : sweep_seed(params.seed, p.b2_hdv, rep);
    const RunRecord rec = run(p, table);
    estimates[k] = equilibrium_estimate(rec, options.window);
    av_agents[k] = rec.n_av;
  });

  std::vector<SweepPoint> curve;
  curve.reserve(b2_grid.size());
  for (std::size_t i = 0; i < b2_grid.size(); ++i) {
    std::vector<double> vals(estimates.begin() + static_cast<std::ptrdiff_t>(i * reps),
                             estimates.begin() + static_cast<std::ptrdiff_t>((i + 1) * reps));
    const MeanCi m = mean_ci95(vals);
    SweepPoint pt{b2_grid[i], m.mean, m.half_width, options.n_replicates, 0};
    for (std::size_t r = 0; r < reps; ++r) pt.av_agents += av_agents[i * reps + r];
    curve.push_back(pt);
  }
  return curve;
}

CalibrationResult find_crossing(const std::vector<SweepPoint>& curve, double target) {
  if (curve.size() < 2) throw DomainError("find_crossing needs at least 2 curve points");
  if (!(target >= 0.0 && target <= 1.0)) throw DomainError("target must lie in [0, 1]");

  auto sign = [target](const SweepPoint& p) {
    return p.mean_coop > target ? 1 : (p.mean_coop < target ? -1 : 0);
  };

  CalibrationResult out;
  out.target = target;
  out.curve = curve;
  bool found = false;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const int si = sign(curve[i]);
    if (si == 0) {
      if (!found) out.b2_star = curve[i].b2;
      found = true;
      ++out.bracket_count;
      continue;
    }
    if (i + 1 < curve.size()) {
      const int sj = sign(curve[i + 1]);
      if (si * sj < 0) {
        if (!found) {
          const auto& a = curve[i];
          const auto& b = curve[i + 1];
          out.b2_star = a.b2 + (b.b2 - a.b2) * (a.mean_coop - target) / (a.mean_coop - b.mean_coop);
        }
        found = true;
        ++out.bracket_count;
      }
    }
  }
  if (!found) {
    const auto [lo, hi] = std::minmax_element(curve.begin(), curve.end(), [](const auto& a, const auto& b) {
      return a.mean_coop < b.mean_coop;
    });
    throw NoCrossingError(target, lo->mean_coop, hi->mean_coop);
  }
  return out;
}

std::string serialize_curve(const std::vector<SweepPoint>& curve) {
  std::string out = "b2,mean,ci,n\n";
  for (const auto& p : curve) {
    out += format_double(p.b2) + "," + format_double(p.mean_coop) + "," + format_double(p.ci95_half_width) + "," +
           std::to_string(p.n_replicates) + "\n";
  }
  return out;
}

std::string serialize_calibration(const CalibrationResult& result) {
  nlohmann::json j{{"b2_star", result.b2_star},
                   {"target", result.target},
                   {"window", result.window},
                   {"bracket_count", result.bracket_count},
                   {"curve_points", result.curve.size()}};
  return j.dump(2) + "\n";
}

}  // namespace qlane
