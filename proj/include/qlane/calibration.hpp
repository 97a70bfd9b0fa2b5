#pragma once

// Calibration of the HDV entanglement parameter: sweep |b|^2_HDV in a
// 100% HDV population and locate where equilibrium cooperation crosses a
// target rate.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlane/lattice.hpp"

namespace qlane {

struct SweepPoint {
  double b2 = 0.0;
  double mean_coop = 0.0;
  double ci95_half_width = 0.0;
  int n_replicates = 0;
  std::size_t av_agents = 0;  // summed over replicates; 0 for a calibration sweep
};

struct CalibrationResult {
  double b2_star = 0.0;
  double target = 0.0;
  std::vector<SweepPoint> curve;
  int window = 0;
  int bracket_count = 0;
};

class NoCrossingError : public std::runtime_error {
 public:
  NoCrossingError(double target, double curve_min, double curve_max);
  double target() const { return target_; }
  double curve_min() const { return min_; }
  double curve_max() const { return max_; }

 private:
  double target_, min_, max_;
};

inline constexpr double kObservedHdvCooperation = 0.42;
inline constexpr int kDefaultWindow = 50;

/// Mean of coop_all over the last `window` steps. Throws DomainError when
/// window < 1 or exceeds the series length.
double equilibrium_estimate(const RunRecord& record, int window);

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;  // 1.96 * sample sd / sqrt(n)
};
MeanCi mean_ci95(const std::vector<double>& values);

struct SweepOptions {
  int n_replicates = 20;
  int window = kDefaultWindow;
  std::size_t jobs = 1;
  // Every replicate reuses params.seed (zero-variance check).
  bool identical_seeds = false;
};

// Seed of replicate `rep` at sweep point b2.
std::uint64_t sweep_seed(std::uint64_t master, double b2, int rep);

/// Replicated runs per grid point with mpr forced to 0. The grid must be
/// ascending; n_replicates must be >= 2.
std::vector<SweepPoint> sweep(const std::vector<double>& b2_grid, SimParams params, const PayoffTable& table,
                              const SweepOptions& options);

/// First adjacent bracket of the target (ascending b2), linearly
/// interpolated. Throws NoCrossingError when no bracket exists.
CalibrationResult find_crossing(const std::vector<SweepPoint>& curve, double target);

// Tabular curve (b2,mean,ci,n) and structured result text.
std::string serialize_curve(const std::vector<SweepPoint>& curve);
std::string serialize_calibration(const CalibrationResult& result);

}  // namespace qlane
