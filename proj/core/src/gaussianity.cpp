#include "twomode/gaussianity.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "twomode/error.hpp"

namespace twomode {

std::size_t PhaseBinning::bin_of(double theta) const {
  const double span = end - start;
  double offset = std::fmod(theta - start, span);
  if (offset < 0.0) offset += span;
  auto bin = static_cast<std::size_t>(offset / width());
  return std::min(bin, n_bins - 1);
}

double kurtosis_excess(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 4) throw Error(Errc::DegenerateSample, fmt::format("kurtosis needs n >= 4, got {}", n));
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : samples) {
    const double d2 = (v - mean) * (v - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  if (!(m2 > 0.0)) throw Error(Errc::DegenerateSample, "sample variance is zero");
  return m4 / (m2 * m2) - 3.0;
}

GaussianityReport gaussianity_report(const HomodyneTrace& trace, const PhaseBinning& binning,
                                     double alpha, std::uint64_t subsample_seed) {
  if (binning.n_bins == 0 || !(binning.end > binning.start)) {
    throw Error(Errc::InvalidArgument, "phase binning needs n_bins > 0 and end > start");
  }
  std::vector<std::vector<double>> bins(binning.n_bins);
  for (const auto& s : trace.samples) bins[binning.bin_of(s.theta)].push_back(s.x);

  GaussianityReport report;
  report.binning = binning;
  report.alpha = alpha;
  report.bins.reserve(binning.n_bins);

  std::mt19937_64 rng(subsample_seed);
  const double bonferroni_alpha = alpha / static_cast<double>(binning.n_bins);
  bool strict = true;
  bool bonferroni = true;
  for (std::size_t b = 0; b < binning.n_bins; ++b) {
    auto& values = bins[b];
    if (values.size() < 4) {
      throw Error(Errc::EmptyBin, fmt::format("phase bin {} of trace '{}' holds {} samples", b,
                                              trace.label, values.size()));
    }
    if (values.size() > kShapiroWilkMaxN) {
      std::vector<double> picked;
      picked.reserve(kShapiroWilkMaxN);
      std::sample(values.begin(), values.end(), std::back_inserter(picked), kShapiroWilkMaxN,
                  rng);
      values = std::move(picked);
    }
    BinStatistics st;
    st.bin = b;
    st.theta_center = binning.center(b);
    st.n = values.size();
    st.gamma = kurtosis_excess(values);
    const auto sw = shapiro_wilk(values);
    st.w = sw.w;
    st.p = sw.p;

    strict = strict && st.p >= alpha;
    bonferroni = bonferroni && st.p >= bonferroni_alpha;
    if (st.p < alpha) ++report.n_rejected;
    report.min_p = std::min(report.min_p, st.p);
    report.max_abs_gamma = std::max(report.max_abs_gamma, std::abs(st.gamma));
    report.bins.push_back(st);
  }
  report.pass = strict;
  report.pass_bonferroni = bonferroni;
  return report;
}

}  // namespace twomode
