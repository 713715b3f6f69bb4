#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twomode/covariance.hpp"

namespace twomode {

/// Physical model of the OPO output:
///   rho = U(beta) S(zeta) LS(xi1, xi2) T LS^dag S^dag U^dag
/// with T a product of thermal states. Squeezing parameters are real;
/// the mixer exp{beta e^{i phi} a^dag b - h.c.} carries an optional phase
/// `beta_phase` that produces anti-diagonal cross-talk in C.
struct OPOModelParams {
  double zeta = 0.0;
  double xi1 = 0.0;
  double xi2 = 0.0;
  double beta = 0.0;
  double beta_phase = 0.0;
  double nbar1 = 0.0;
  double nbar2 = 0.0;
};

/// 4x4 real matrix acting on (x_a, y_a, x_b, y_b) in the Heisenberg picture.
struct SymplecticTransform {
  Matrix4 matrix = Matrix4::Identity();

  /// max |S Omega S^T - Omega|.
  double symplectic_defect() const;
};

SymplecticTransform two_mode_squeezer(double zeta);
SymplecticTransform local_squeezers(double xi1, double xi2);
SymplecticTransform mode_mixer(double beta, double phase = 0.0);

/// The six homodyne-accessible modes: a, b and the combinations
/// c = (a+b)/sqrt2, d = (a-b)/sqrt2, e = (ia+b)/sqrt2, f = (ia-b)/sqrt2.
enum class Mode { a, b, c, d, e, f };

inline constexpr Mode kAllModes[] = {Mode::a, Mode::b, Mode::c, Mode::d, Mode::e, Mode::f};

std::string_view to_string(Mode mode) noexcept;
std::optional<Mode> parse_mode(std::string_view name) noexcept;

/// Mirrors the acquisition chain: 0.91 photodiode efficiency times 0.98^2
/// visibility, and electronic noise 16 dB under shot noise.
inline constexpr double kDefaultEfficiency = 0.87;
inline constexpr double kDefaultElectronicNoise = 0.5 * 0.025118864315095794;  // 0.5 * 10^-1.6
inline constexpr double kDefaultPhaseJitter = 0.020;

struct MeasurementConfig {
  Mode mode = Mode::a;
  double eta = kDefaultEfficiency;
  double electronic_noise_var = kDefaultElectronicNoise;
  std::size_t n_samples = 100000;
  double sweep_start = 0.0;
  double sweep_end = 2.0 * std::numbers::pi;
  std::uint64_t seed = 0;
  /// Standard deviation of Gaussian LO phase noise (radians) applied to the
  /// true phase of each sample; the recorded theta stays nominal.
  double phase_jitter = 0.0;
};

struct HomodyneSample {
  double theta = 0.0;
  double x = 0.0;
};

struct HomodyneTrace {
  /// Label written to trace files; "vac" for shot-noise traces.
  std::string label;
  MeasurementConfig config;
  /// Normalization of the samples: variance of a vacuum quadrature in the
  /// units of `samples[i].x`. 0.5 for shot-noise-normalized traces.
  double shotnoise_var = kVacuumVariance;
  /// Seconds since the Unix epoch at generation; not part of the file format.
  std::int64_t generated_at = 0;
  std::vector<HomodyneSample> samples;
};

CovarianceMatrix cm_from_model(const OPOModelParams& params);

/// u such that x_theta(mode) = u . (x_a, y_a, x_b, y_b).
Vector4 mode_quadrature_coefficients(Mode mode, double theta);

/// 2x2 CM of a single derived mode.
Matrix2 mode_covariance(const CovarianceMatrix& cm, Mode mode);

/// eta u^T sigma u + (1 - eta)/2 + V_el.
double true_variance(const CovarianceMatrix& cm, Mode mode, double theta, double eta,
                     double electronic_noise_var);

/// Linear phase sweep over [sweep_start, sweep_end) with independent
/// zero-mean Gaussian samples. Deterministic in `config.seed`.
HomodyneTrace sample_trace(const CovarianceMatrix& cm, const MeasurementConfig& config);

/// Vacuum trace with eta = 1 and the configured electronic noise.
HomodyneTrace shot_noise_trace(const MeasurementConfig& config);

/// Per-trace seed expansion: splitmix64(master + 0x9E3779B97F4A7C15 * (stream + 1)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

}  // namespace twomode
