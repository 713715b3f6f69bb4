#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"
#include "twomode/error.hpp"
#include "twomode/pipeline.hpp"
#include "twomode/reconstruction.hpp"

using namespace twomode;
using std::numbers::pi;

namespace {

QuadratureMoments exact_moments(const CovarianceMatrix& cm, const Vector4& mu, Mode m, double phi) {
  const Vector4 u = mode_quadrature_coefficients(m, phi);
  QuadratureMoments q;
  q.mean.mean = u.dot(mu);
  q.mean.confidence = 1e-3;
  q.second.mean = u.dot(cm.matrix() * u) + q.mean.mean * q.mean.mean;
  q.second.confidence = 1e-2;
  return q;
}

ModeEstimates exact_estimates(const CovarianceMatrix& cm, bool with_f = true,
                              const Vector4& mu = Vector4::Zero()) {
  ModeEstimates est;
  for (Mode m : kAllModes) {
    if (m == Mode::f && !with_f) continue;
    ModeMoments mm;
    mm.x = exact_moments(cm, mu, m, 0.0);
    mm.y = exact_moments(cm, mu, m, pi / 2);
    if (m == Mode::a || m == Mode::b) {
      mm.z = exact_moments(cm, mu, m, pi / 4);
      mm.t = exact_moments(cm, mu, m, -pi / 4);
    }
    est[m] = mm;
  }
  return est;
}

ModeEstimates estimates_from(const TraceSet& set) {
  ModeEstimates est;
  for (Mode m : kAllModes) {
    if (!set[m]) continue;
    est[m] = estimate_mode(*set[m], set[m]->config.eta, set[m]->config.electronic_noise_var,
                           m == Mode::a || m == Mode::b);
  }
  return est;
}

double shift(const CovarianceMatrix& cm, Mode m, double th, double d) {
  const double v0 = true_variance(cm, m, th, 1.0, 0.0);
  return std::max(std::abs(true_variance(cm, m, th + d, 1.0, 0.0) - v0),
                  std::abs(true_variance(cm, m, th - d, 1.0, 0.0) - v0));
}

}  // namespace

TEST(DiagBlock, ThermalMode) {
  const auto est = exact_estimates(CovarianceMatrix::diagonal(1.3, 1.3, 0.7, 0.7));
  const auto b = reconstruct_diag_block(est, Mode::a);
  EXPECT_NEAR(b.value(0, 0), 1.3, 1e-14);
  EXPECT_NEAR(b.value(1, 1), 1.3, 1e-14);
  EXPECT_NEAR(b.value(0, 1), 0.0, 1e-14);
}

TEST(DiagBlock, OffDiagonalFromDiagonalQuadratures) {
  ModeEstimates est;
  ModeMoments m;
  m.x.second.mean = 0.5;
  m.y.second.mean = 0.5;
  m.z = QuadratureMoments{};
  m.t = QuadratureMoments{};
  m.z->second.mean = 0.6;
  m.t->second.mean = 0.4;
  est[Mode::b] = m;
  EXPECT_NEAR(reconstruct_diag_block(est, Mode::b).value(0, 1), 0.1, 1e-15);
}

TEST(DiagBlock, MissingEstimates) {
  auto est = exact_estimates(CovarianceMatrix::vacuum());
  est[Mode::a]->z.reset();
  try {
    reconstruct_diag_block(est, Mode::a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingEstimate);
  }
  est[Mode::b].reset();
  EXPECT_THROW(reconstruct_diag_block(est, Mode::b), Error);
}

TEST(CrossBlock, TwinBeam) {
  const double r = 0.6;
  for (bool with_f : {true, false}) {
    bool substituted = false;
    const auto c = reconstruct_cross_block(exact_estimates(fixtures::twin_beam(r), with_f), &substituted);
    EXPECT_EQ(substituted, !with_f);
    EXPECT_NEAR(c.value(0, 0), std::sinh(2 * r) / 2, 1e-13);
    EXPECT_NEAR(c.value(1, 1), -std::sinh(2 * r) / 2, 1e-13);
    EXPECT_NEAR(c.value(0, 1), 0.0, 1e-13);
    EXPECT_NEAR(c.value(1, 0), 0.0, 1e-13);
  }
}

TEST(CrossBlock, ProductStateGivesZero) {
  const auto c = reconstruct_cross_block(exact_estimates(CovarianceMatrix::diagonal(0.9, 0.6, 1.4, 0.5)));
  EXPECT_LT(c.value.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(CrossBlock, MissingAuxiliaryMode) {
  auto est = exact_estimates(fixtures::twin_beam(0.3));
  est[Mode::e].reset();
  EXPECT_THROW(reconstruct_cross_block(est), Error);
}

TEST(Reconstruct, ExactMomentsRecoverArbitraryCm) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 50; ++i) {
    const auto cm = fixtures::random_physical_cm(rng);
    for (bool with_f : {true, false}) {
      const auto r = reconstruct(exact_estimates(cm, with_f));
      EXPECT_LT((r.sigma - cm.matrix()).cwiseAbs().maxCoeff(), 1e-11);
      EXPECT_TRUE(r.physical);
      EXPECT_EQ(r.used_f_substitution, !with_f);
      EXPECT_EQ(r.errors, r.errors.transpose());
    }
  }
}

TEST(Reconstruct, MeanProductsAreSubtracted) {
  const auto cm = fixtures::published_strong();
  const Vector4 mu(0.4, -0.3, 0.2, 0.7);
  for (bool with_f : {true, false}) {
    const auto r = reconstruct(exact_estimates(cm, with_f, mu));
    EXPECT_LT((r.sigma - cm.matrix()).cwiseAbs().maxCoeff(), 1e-12) << with_f;
  }
}

TEST(PhaseInflation, ZeroDeltaAndThermalLeaveErrors) {
  auto r = reconstruct(exact_estimates(fixtures::twin_beam(0.5)));
  const Matrix4 before = r.errors;
  phase_error_inflation(r, 0.0);
  EXPECT_EQ(r.errors, before);

  auto th = reconstruct(exact_estimates(CovarianceMatrix::diagonal(1.2, 1.2, 0.8, 0.8)));
  const Matrix4 th_before = th.errors;
  phase_error_inflation(th, 0.02);
  EXPECT_EQ(th.errors, th_before);
  EXPECT_THROW(phase_error_inflation(th, -0.1), Error);
}

TEST(PhaseInflation, TwinBeamMatchesModelVarianceShift) {
  const auto cm = fixtures::twin_beam(0.5);
  const double d = 0.020;
  const auto [p14, p23] = phase_error_terms(cm.matrix(), d, false);
  EXPECT_NEAR(p14, 0.5 * std::hypot(shift(cm, Mode::e, pi / 2, d), shift(cm, Mode::f, pi / 2, d)), 1e-15);
  EXPECT_NEAR(p23, 0.5 * std::hypot(shift(cm, Mode::e, 0, d), shift(cm, Mode::f, 0, d)), 1e-15);
  // first order in d at the steepest point: |dV/dtheta| = sinh(2r)
  EXPECT_NEAR(shift(cm, Mode::e, pi / 2, d), std::sinh(1.0) * d, 1e-3 * d);

  auto r = reconstruct(exact_estimates(cm));
  phase_error_inflation(r, d);
  EXPECT_NEAR(r.errors(0, 3), std::max(p14, 0.5 * std::hypot(1e-2, 1e-2)), 1e-15);
  EXPECT_EQ(r.errors(3, 0), r.errors(0, 3));
  EXPECT_EQ(r.errors(0, 2), 0.5 * std::hypot(1e-2, 1e-2));
}

TEST(Gate, Examples) {
  ReconstructedCM r;
  r.sigma = fixtures::published_typical().matrix();
  EXPECT_TRUE(physicality_gate(r).accept);

  r.sigma = 0.3 * Matrix4::Identity();
  const auto g = physicality_gate(r);
  EXPECT_FALSE(g.accept);
  EXPECT_NEAR(g.d_minus, 0.3, 1e-12);

  r.sigma = 0.5 * Matrix4::Identity();
  r.sigma(0, 0) -= 1e-8;
  r.sigma(1, 2) = r.sigma(2, 1) = 1e-8;
  EXPECT_TRUE(physicality_gate(r, 1e-6).accept);

  r.sigma = 0.5 * Matrix4::Identity();
  r.sigma(0, 2) = r.sigma(2, 0) = 0.7;
  const auto bad = physicality_gate(r);
  EXPECT_FALSE(bad.accept);
  EXPECT_TRUE(std::isnan(bad.d_minus));
}

TEST(PropagatedError, LinearFunctions) {
  Matrix4 err = Matrix4::Zero();
  err(0, 0) = 0.03;
  err(1, 1) = 0.04;
  err(0, 2) = err(2, 0) = 0.05;
  const Matrix4 sigma = fixtures::published_typical().matrix();
  EXPECT_NEAR(propagated_error(sigma, err, [](const CovarianceMatrix& c) { return c(0, 0); }), 0.03, 1e-9);
  EXPECT_NEAR(propagated_error(sigma, err, [](const CovarianceMatrix& c) { return c(0, 0) + c(1, 1); }),
              0.05, 1e-9);
  EXPECT_NEAR(propagated_error(sigma, err, [](const CovarianceMatrix& c) { return c(2, 0); }), 0.05, 1e-9);
}

// Sampling round trip on a cross-talk model (non-zero anti-diagonal C).
TEST(RoundTrip, SeededTracesWithinFourSigma) {
  const auto cm = cm_from_model({.zeta = 0.7, .beta = 0.05, .beta_phase = 0.8, .nbar1 = 0.3, .nbar2 = 0.2});
  SynthesisConfig sc;
  sc.seed = 77;
  const auto set = synthesize(cm, sc);
  auto r = reconstruct(estimates_from(set));
  phase_error_inflation(r, 0.02);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      EXPECT_LE(std::abs(r.sigma(i, j) - cm(i, j)), 4 * r.errors(i, j)) << i << "," << j;
    }
  }
  EXPECT_TRUE(r.physical);
}

TEST(RoundTrip, FSubstitutionAgreesWithinErrors) {
  const auto cm = cm_from_model({.zeta = 0.6, .beta = 0.05, .nbar1 = 0.3, .nbar2 = 0.3});
  SynthesisConfig sc;
  sc.seed = 78;
  const auto set = synthesize(cm, sc);
  auto est = estimates_from(set);
  const auto with_f = reconstruct(est);
  est[Mode::f].reset();
  const auto without_f = reconstruct(est);
  ASSERT_TRUE(without_f.used_f_substitution);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double combined = std::hypot(with_f.errors(i, j), without_f.errors(i, j));
      EXPECT_LE(std::abs(with_f.sigma(i, j) - without_f.sigma(i, j)), 4 * combined) << i << "," << j;
    }
  }
}

TEST(RoundTrip, ShotNoiseNormalizationIsScaleEquivariant) {
  const auto cm = fixtures::twin_beam(0.4);
  SynthesisConfig sc;
  sc.n_samples = 20000;
  sc.seed = 79;
  const auto set = synthesize(cm, sc);
  TraceSet scaled = set;
  const double k = 3.7;
  for (auto& t : scaled.modes) {
    if (!t) continue;
    for (auto& s : t->samples) s.x *= k;
    t->shotnoise_var = 0.5 * k * k;
    t->config.electronic_noise_var *= k * k;
  }
  TraceSet back;
  for (Mode m : kAllModes) back[m] = normalized(*scaled[m]);
  const auto a = reconstruct(estimates_from(set));
  const auto b = reconstruct(estimates_from(back));
  EXPECT_LT((a.sigma - b.sigma).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((a.errors - b.errors).cwiseAbs().maxCoeff(), 1e-12);
}
