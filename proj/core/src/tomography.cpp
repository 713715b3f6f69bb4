#include "twomode/tomography.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "twomode/error.hpp"
#include "twomode/gaussianity.hpp"

namespace twomode {
namespace {

void check_eta(double eta) {
  if (!(eta > 0.5 && eta <= 1.0)) {
    throw Error(Errc::EfficiencyOutOfRange,
                fmt::format("pattern-function kernels need 1/2 < eta <= 1, got {}", eta));
  }
}

// Kernel with x^2 and x^4 replaced by their unbiased estimates in the
// presence of additive Gaussian noise of variance `noise` (kernel units).
double kernel_value(const KernelId& id, double x, double theta, double eta, double noise) {
  const double x2 = x * x - noise;
  switch (id.kind) {
    case KernelKind::Number:
      return 2.0 * x2 - 1.0 / (2.0 * eta);
    case KernelKind::NumberSquared: {
      const double x4 = x * x * x * x - 6.0 * noise * x * x + 3.0 * noise * noise;
      return 8.0 / 3.0 * x4 - 2.0 * x2;
    }
    case KernelKind::Quad:
      return 2.0 * x * std::cos(id.phi - theta);
    case KernelKind::QuadSquared: {
      const double c = std::cos(id.phi - theta);
      return 0.25 * (1.0 + (4.0 * x2 - 1.0 / eta) * (4.0 * c * c - 1.0));
    }
  }
  return 0.0;
}

// Factor taking a kernel mean back to vacuum-1/2 units.
double output_scale(KernelKind kind) {
  switch (kind) {
    case KernelKind::Quad: return std::sqrt(2.0);
    case KernelKind::QuadSquared: return 2.0;
    default: return 1.0;
  }
}

}  // namespace

double kernel_eval(const KernelId& id, double x, double theta, double eta) {
  check_eta(eta);
  return kernel_value(id, x, theta, eta, 0.0);
}

bool phase_coverage_uniform(const HomodyneTrace& trace) {
  const PhaseBinning binning{104, trace.config.sweep_start, trace.config.sweep_end};
  if (trace.samples.empty() || !(binning.end > binning.start)) return false;
  std::vector<std::size_t> counts(binning.n_bins, 0);
  for (const auto& s : trace.samples) ++counts[binning.bin_of(s.theta)];
  const double expected =
      static_cast<double>(trace.samples.size()) / static_cast<double>(binning.n_bins);
  for (std::size_t c : counts) {
    if (std::abs(static_cast<double>(c) - expected) > 0.2 * expected) return false;
  }
  return true;
}

TomographicEstimate estimate(const HomodyneTrace& trace, const KernelId& id, double eta,
                             double electronic_noise_var) {
  check_eta(eta);
  if (trace.samples.empty()) {
    throw Error(Errc::EmptyTrace, fmt::format("trace '{}' has no samples", trace.label));
  }
  // vacuum-1/2 units -> vacuum-1/4 units, then the 1/sqrt(eta) rescale.
  const double to_kernel = 1.0 / std::sqrt(2.0 * eta);
  const double noise = electronic_noise_var * to_kernel * to_kernel;

  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& s : trace.samples) {
    const double r = kernel_value(id, s.x * to_kernel, s.theta, eta, noise);
    sum += r;
    sum_sq += r * r;
  }
  const double n = static_cast<double>(trace.samples.size());
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  const double scale = output_scale(id.kind);

  TomographicEstimate est;
  est.mean = scale * mean;
  est.confidence = scale * std::sqrt(var / n);
  est.n_used = trace.samples.size();
  est.phase_uniform = phase_coverage_uniform(trace);
  return est;
}

QuadratureMoments quadrature_moments(const HomodyneTrace& trace, double phi, double eta,
                                     double electronic_noise_var) {
  return {estimate(trace, KernelId::quad(phi), eta, electronic_noise_var),
          estimate(trace, KernelId::quad_squared(phi), eta, electronic_noise_var)};
}

TomographicEstimate quadrature_variance(const HomodyneTrace& trace, double phi, double eta,
                                        double electronic_noise_var) {
  const auto mom = quadrature_moments(trace, phi, eta, electronic_noise_var);
  TomographicEstimate out = mom.second;
  out.mean = mom.variance();
  const double mean_term = 2.0 * mom.mean.mean * mom.mean.confidence;
  out.confidence = std::sqrt(mom.second.confidence * mom.second.confidence + mean_term * mean_term);
  out.phase_uniform = mom.mean.phase_uniform && mom.second.phase_uniform;
  return out;
}

}  // namespace twomode
