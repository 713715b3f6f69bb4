#pragma once

#include "twomode/synthesis.hpp"

namespace twomode {

enum class KernelKind { Number, NumberSquared, Quad, QuadSquared };

/// Observable whose mean is estimated by pattern-function averaging.
/// `phi` is used by the quadrature kernels only.
struct KernelId {
  KernelKind kind = KernelKind::Number;
  double phi = 0.0;

  static KernelId number() { return {KernelKind::Number, 0.0}; }
  static KernelId number_squared() { return {KernelKind::NumberSquared, 0.0}; }
  static KernelId quad(double phi) { return {KernelKind::Quad, phi}; }
  static KernelId quad_squared(double phi) { return {KernelKind::QuadSquared, phi}; }
};

/// Pattern-function kernels for eta > 1/2:
///   R[a^dag a]     = 2x^2 - 1/(2 eta)
///   R[(a^dag a)^2] = (8/3) x^4 - 2 x^2
///   R[x_phi]       = 2 x cos(phi - theta)
///   R[x_phi^2]     = 1/4 {1 + (4x^2 - 1/eta)[4 cos^2(phi - theta) - 1]}
///
/// The kernels are written for homodyne outcomes in units where the vacuum
/// quadrature variance is 1/4, rescaled by 1/sqrt(eta). `estimate` does
/// that conversion from shot-noise-normalized (vacuum 1/2) traces.
double kernel_eval(const KernelId& id, double x, double theta, double eta);

struct TomographicEstimate {
  double mean = 0.0;
  double confidence = 0.0;  ///< one standard error, sqrt(kernel variance / N)
  std::size_t n_used = 0;
  /// Every one of 104 phase bins holds N/104 samples within +-20%.
  bool phase_uniform = true;
};

/// Sample mean of the kernel over the trace. Quadrature results are in
/// vacuum-1/2 units. A known Gaussian electronic-noise variance (vacuum-1/2
/// units) is removed from the even moments before the kernel is applied.
/// Throws EmptyTrace or EfficiencyOutOfRange (eta <= 1/2 or eta > 1).
TomographicEstimate estimate(const HomodyneTrace& trace, const KernelId& id, double eta,
                             double electronic_noise_var = 0.0);

/// <x_phi> and <x_phi^2> from one trace.
struct QuadratureMoments {
  TomographicEstimate mean;
  TomographicEstimate second;
  double variance() const { return second.mean - mean.mean * mean.mean; }
};

QuadratureMoments quadrature_moments(const HomodyneTrace& trace, double phi, double eta,
                                     double electronic_noise_var = 0.0);

/// <x_phi^2> - <x_phi>^2 with both kernel errors combined.
TomographicEstimate quadrature_variance(const HomodyneTrace& trace, double phi, double eta,
                                        double electronic_noise_var = 0.0);

/// 104-bin occupancy check used to flag phase coverage.
bool phase_coverage_uniform(const HomodyneTrace& trace);

}  // namespace twomode
