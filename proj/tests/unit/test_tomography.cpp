#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"
#include "twomode/error.hpp"
#include "twomode/tomography.hpp"

using namespace twomode;
using std::numbers::pi;

namespace {

HomodyneTrace trace_of(const CovarianceMatrix& cm, Mode mode, std::uint64_t seed,
                       std::size_t n = 200000, double eta = 0.87) {
  MeasurementConfig mc;
  mc.mode = mode;
  mc.eta = eta;
  mc.n_samples = n;
  mc.seed = seed;
  return sample_trace(cm, mc);
}

}  // namespace

TEST(Kernels, PrintedFormulas) {
  const double eta = 0.8, x = 0.7, th = 0.3;
  EXPECT_NEAR(kernel_eval(KernelId::number(), x, th, eta), 2 * x * x - 1 / (2 * eta), 1e-15);
  EXPECT_NEAR(kernel_eval(KernelId::number_squared(), x, th, eta),
              8.0 / 3 * std::pow(x, 4) - 2 * x * x, 1e-15);
  EXPECT_NEAR(kernel_eval(KernelId::quad(1.0), x, th, eta), 2 * x * std::cos(1.0 - th), 1e-15);
  const double c = std::cos(1.0 - th);
  EXPECT_NEAR(kernel_eval(KernelId::quad_squared(1.0), x, th, eta),
              0.25 * (1 + (4 * x * x - 1 / eta) * (4 * c * c - 1)), 1e-15);
}

TEST(Kernels, EfficiencyBounds) {
  for (double eta : {0.5, 0.2, 1.01}) {
    try {
      kernel_eval(KernelId::number(), 0.1, 0.0, eta);
      FAIL() << eta;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::EfficiencyOutOfRange);
    }
  }
  EXPECT_NO_THROW(kernel_eval(KernelId::number(), 0.1, 0.0, 0.51));
}

TEST(Estimate, ThermalPhotonNumberAndSquare) {
  const double nbar = 1.0;
  const auto cm = cm_from_model({.nbar1 = nbar});
  const auto t = trace_of(cm, Mode::a, 31);
  const auto n = estimate(t, KernelId::number(), 0.87, t.config.electronic_noise_var);
  EXPECT_NEAR(n.mean, nbar, 4 * n.confidence);
  EXPECT_EQ(n.n_used, t.samples.size());
  EXPECT_TRUE(n.phase_uniform);
  // The (a^dag a)^2 kernel carries no efficiency terms; it is exact at eta = 1 only.
  const auto ideal = trace_of(cm, Mode::a, 31, 200000, 1.0);
  const auto n2 = estimate(ideal, KernelId::number_squared(), 1.0, ideal.config.electronic_noise_var);
  EXPECT_NEAR(n2.mean, 2 * nbar * nbar + nbar, 4 * n2.confidence);
}

TEST(Estimate, QuadratureVarianceCorrectsLossAndNoise) {
  const auto cm = fixtures::twin_beam(0.5);
  const auto t = trace_of(cm, Mode::c, 32);
  for (double phi : {0.0, pi / 4, pi / 2, 1.0}) {
    const auto v = quadrature_variance(t, phi, 0.87, t.config.electronic_noise_var);
    EXPECT_NEAR(v.mean, true_variance(cm, Mode::c, phi, 1.0, 0.0), 4 * v.confidence) << phi;
  }
}

TEST(Estimate, IgnoringElectronicNoiseBiasesVariance) {
  const auto cm = fixtures::twin_beam(0.5);
  MeasurementConfig mc;
  mc.mode = Mode::c;
  mc.electronic_noise_var = 0.05;
  mc.n_samples = 400000;
  mc.seed = 33;
  const auto t = sample_trace(cm, mc);
  const double want = true_variance(cm, Mode::c, pi / 2, 1.0, 0.0);
  const auto corrected = quadrature_variance(t, pi / 2, 0.87, 0.05);
  const auto raw = quadrature_variance(t, pi / 2, 0.87, 0.0);
  EXPECT_NEAR(corrected.mean, want, 4 * corrected.confidence);
  EXPECT_NEAR(raw.mean - want, 0.05 / 0.87, 4 * raw.confidence);
}

TEST(Estimate, DisplacedMean) {
  // x_theta = m cos(theta) + vacuum noise, recorded at efficiency eta.
  const double m = 0.8, eta = 0.9;
  std::mt19937_64 rng(34);
  std::normal_distribution<double> noise(0.0, std::sqrt(0.5));
  HomodyneTrace t;
  t.config.eta = eta;
  const std::size_t n = 200000;
  for (std::size_t i = 0; i < n; ++i) {
    const double th = 2 * pi * static_cast<double>(i) / n;
    t.samples.push_back({th, std::sqrt(eta) * m * std::cos(th) + noise(rng)});
  }
  const auto mx = estimate(t, KernelId::quad(0.0), eta);
  const auto my = estimate(t, KernelId::quad(pi / 2), eta);
  EXPECT_NEAR(mx.mean, m, 4 * mx.confidence);
  EXPECT_NEAR(my.mean, 0.0, 4 * my.confidence);
  const auto mom = quadrature_moments(t, 0.0, eta);
  EXPECT_NEAR(mom.variance(), 0.5, 4 * mom.second.confidence + 8 * m * mx.confidence);
}

TEST(Estimate, EmptyTraceThrows) {
  HomodyneTrace t;
  try {
    estimate(t, KernelId::number(), 0.9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyTrace);
  }
}

TEST(Estimate, ConfidenceShrinksWithSamples) {
  const auto cm = fixtures::twin_beam(0.3);
  const auto small = estimate(trace_of(cm, Mode::a, 35, 10000), KernelId::quad_squared(0), 0.87);
  const auto big = estimate(trace_of(cm, Mode::a, 35, 160000), KernelId::quad_squared(0), 0.87);
  EXPECT_NEAR(small.confidence / big.confidence, 4.0, 0.4);
}

TEST(PhaseCoverage, DetectsGaps) {
  auto t = trace_of(CovarianceMatrix::vacuum(), Mode::a, 36, 20800);
  EXPECT_TRUE(phase_coverage_uniform(t));
  t.samples.resize(t.samples.size() / 2);
  EXPECT_FALSE(phase_coverage_uniform(t));
}
