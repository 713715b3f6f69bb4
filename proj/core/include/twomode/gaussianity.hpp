#pragma once

#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "twomode/synthesis.hpp"

namespace twomode {

/// Fixed-width phase bins over [start, end).
struct PhaseBinning {
  std::size_t n_bins = 104;
  double start = 0.0;
  double end = 2.0 * std::numbers::pi;

  double width() const { return (end - start) / static_cast<double>(n_bins); }
  /// Bin index of theta, wrapping theta periodically into [start, end).
  std::size_t bin_of(double theta) const;
  double center(std::size_t bin) const { return start + (static_cast<double>(bin) + 0.5) * width(); }
};

struct ShapiroWilkResult {
  double w = 0.0;
  double p = 0.0;
};

inline constexpr std::size_t kShapiroWilkMinN = 3;
inline constexpr std::size_t kShapiroWilkMaxN = 5000;

/// gamma = m4 / m2^2 - 3 with equal weights. Throws DegenerateSample for
/// n < 4 or zero variance.
double kurtosis_excess(std::span<const double> samples);

/// Shapiro-Wilk W and its p-value using Royston's polynomial
/// approximations to the weights and to the null distribution of W
/// (Applied Statistics algorithm R94). Valid for 3 <= n <= 5000.
/// Throws SampleSizeOutOfRange or DegenerateSample (zero range, or more
/// than half of the values identical).
ShapiroWilkResult shapiro_wilk(std::span<const double> samples);

struct BinStatistics {
  std::size_t bin = 0;
  double theta_center = 0.0;
  std::size_t n = 0;  ///< samples tested (after subsampling)
  double gamma = 0.0;
  double w = 0.0;
  double p = 0.0;
};

struct GaussianityReport {
  PhaseBinning binning;
  double alpha = 0.05;
  std::vector<BinStatistics> bins;
  /// Every bin has p >= alpha.
  bool pass = false;
  /// Every bin has p >= alpha / n_bins.
  bool pass_bonferroni = false;
  std::size_t n_rejected = 0;  ///< bins with p < alpha
  double min_p = 1.0;
  double max_abs_gamma = 0.0;
};

/// Bins the trace by phase and runs both tests per bin. Bins larger than
/// the Shapiro-Wilk range are subsampled without replacement using
/// `subsample_seed`. Throws EmptyBin if a bin has fewer than 4 samples.
GaussianityReport gaussianity_report(const HomodyneTrace& trace, const PhaseBinning& binning,
                                     double alpha = 0.05, std::uint64_t subsample_seed = 0);

}  // namespace twomode
