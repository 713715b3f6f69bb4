#include "twomode/synthesis.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "twomode/error.hpp"

namespace twomode {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

struct QuadraturePair {
  Vector4 x;
  Vector4 y;
};

QuadraturePair mode_axes(Mode mode) {
  const double h = kInvSqrt2;
  switch (mode) {
    case Mode::a: return {{1, 0, 0, 0}, {0, 1, 0, 0}};
    case Mode::b: return {{0, 0, 1, 0}, {0, 0, 0, 1}};
    case Mode::c: return {{h, 0, h, 0}, {0, h, 0, h}};
    case Mode::d: return {{h, 0, -h, 0}, {0, h, 0, -h}};
    case Mode::e: return {{0, -h, h, 0}, {h, 0, 0, h}};
    case Mode::f: return {{0, -h, -h, 0}, {h, 0, 0, -h}};
  }
  return {Vector4::Zero(), Vector4::Zero()};
}

}  // namespace

double SymplecticTransform::symplectic_defect() const {
  const Matrix4 omega = symplectic_form();
  return (matrix * omega * matrix.transpose() - omega).cwiseAbs().maxCoeff();
}

SymplecticTransform two_mode_squeezer(double zeta) {
  // a -> a cosh(zeta) + b^dag sinh(zeta)
  const double ch = std::cosh(zeta);
  const double sh = std::sinh(zeta);
  SymplecticTransform t;
  t.matrix << ch, 0, sh, 0,
              0, ch, 0, -sh,
              sh, 0, ch, 0,
              0, -sh, 0, ch;
  return t;
}

SymplecticTransform local_squeezers(double xi1, double xi2) {
  SymplecticTransform t;
  t.matrix = Vector4(std::exp(xi1), std::exp(-xi1), std::exp(xi2), std::exp(-xi2))
                 .asDiagonal()
                 .toDenseMatrix();
  return t;
}

SymplecticTransform mode_mixer(double beta, double phase) {
  // a -> a cos(beta) + e^{i phase} b sin(beta)
  // b -> b cos(beta) - e^{-i phase} a sin(beta)
  const double c = std::cos(beta);
  const double s = std::sin(beta);
  const double cp = std::cos(phase);
  const double sp = std::sin(phase);
  SymplecticTransform t;
  t.matrix << c, 0, s * cp, -s * sp,
              0, c, s * sp, s * cp,
              -s * cp, -s * sp, c, 0,
              s * sp, -s * cp, 0, c;
  return t;
}

std::string_view to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::a: return "a";
    case Mode::b: return "b";
    case Mode::c: return "c";
    case Mode::d: return "d";
    case Mode::e: return "e";
    case Mode::f: return "f";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view name) noexcept {
  for (Mode m : kAllModes) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

CovarianceMatrix cm_from_model(const OPOModelParams& p) {
  const double values[] = {p.zeta, p.xi1, p.xi2, p.beta, p.beta_phase, p.nbar1, p.nbar2};
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "model parameters must be finite");
  }
  if (p.nbar1 < 0.0 || p.nbar2 < 0.0) {
    throw Error(Errc::InvalidArgument, "thermal photon numbers must be non-negative");
  }
  const Matrix4 thermal =
      Vector4(p.nbar1 + 0.5, p.nbar1 + 0.5, p.nbar2 + 0.5, p.nbar2 + 0.5).asDiagonal();
  const Matrix4 s = mode_mixer(p.beta, p.beta_phase).matrix * two_mode_squeezer(p.zeta).matrix *
                    local_squeezers(p.xi1, p.xi2).matrix;
  const Matrix4 sigma = s * thermal * s.transpose();
  return CovarianceMatrix(0.5 * (sigma + sigma.transpose()));
}

Vector4 mode_quadrature_coefficients(Mode mode, double theta) {
  const auto axes = mode_axes(mode);
  return std::cos(theta) * axes.x + std::sin(theta) * axes.y;
}

Matrix2 mode_covariance(const CovarianceMatrix& cm, Mode mode) {
  const auto axes = mode_axes(mode);
  Eigen::Matrix<double, 4, 2> u;
  u.col(0) = axes.x;
  u.col(1) = axes.y;
  return u.transpose() * cm.matrix() * u;
}

double true_variance(const CovarianceMatrix& cm, Mode mode, double theta, double eta,
                     double electronic_noise_var) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw Error(Errc::EfficiencyOutOfRange, fmt::format("eta must lie in (0, 1], got {}", eta));
  }
  const Vector4 u = mode_quadrature_coefficients(mode, theta);
  return eta * u.dot(cm.matrix() * u) + (1.0 - eta) * kVacuumVariance + electronic_noise_var;
}

namespace {

HomodyneTrace sample_impl(const CovarianceMatrix& cm, const MeasurementConfig& config,
                          std::string label) {
  if (!(config.eta > 0.0 && config.eta <= 1.0)) {
    throw Error(Errc::EfficiencyOutOfRange,
                fmt::format("eta must lie in (0, 1], got {}", config.eta));
  }
  if (config.electronic_noise_var < 0.0) {
    throw Error(Errc::InvalidArgument, "electronic noise variance must be non-negative");
  }
  HomodyneTrace trace;
  trace.label = std::move(label);
  trace.config = config;
  trace.generated_at = std::chrono::duration_cast<std::chrono::seconds>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count();
  trace.samples.reserve(config.n_samples);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double span = config.sweep_end - config.sweep_start;
  const double n = static_cast<double>(config.n_samples);
  for (std::size_t i = 0; i < config.n_samples; ++i) {
    const double theta = config.sweep_start + span * static_cast<double>(i) / n;
    double actual = theta;
    if (config.phase_jitter > 0.0) actual += config.phase_jitter * unit(rng);
    const double var =
        true_variance(cm, config.mode, actual, config.eta, config.electronic_noise_var);
    trace.samples.push_back({theta, std::sqrt(var) * unit(rng)});
  }
  return trace;
}

}  // namespace

HomodyneTrace sample_trace(const CovarianceMatrix& cm, const MeasurementConfig& config) {
  return sample_impl(cm, config, std::string(to_string(config.mode)));
}

HomodyneTrace shot_noise_trace(const MeasurementConfig& config) {
  MeasurementConfig vac = config;
  vac.eta = 1.0;
  vac.mode = Mode::a;
  return sample_impl(CovarianceMatrix::vacuum(), vac, "vac");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace twomode
