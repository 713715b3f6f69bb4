#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "twomode/covariance.hpp"
#include "twomode/gaussian.hpp"
#include "twomode/synthesis.hpp"
#include "twomode/tomography.hpp"

namespace twomode {

/// Tomographic first and second moments of one mode's x (phi = 0),
/// y (phi = pi/2), z (phi = pi/4) and t (phi = -pi/4) quadratures.
struct ModeMoments {
  QuadratureMoments x;
  QuadratureMoments y;
  std::optional<QuadratureMoments> z;
  std::optional<QuadratureMoments> t;
};

/// Moments for modes a..f. Modes a, b need z and t; f may be absent.
struct ModeEstimates {
  std::array<std::optional<ModeMoments>, 6> modes;

  std::optional<ModeMoments>& operator[](Mode m) { return modes[static_cast<std::size_t>(m)]; }
  const std::optional<ModeMoments>& operator[](Mode m) const {
    return modes[static_cast<std::size_t>(m)];
  }
};

ModeMoments estimate_mode(const HomodyneTrace& trace, double eta, double electronic_noise_var,
                          bool with_diagonals);

/// 2x2 block and its element-wise one-sigma errors.
struct BlockEstimate {
  Matrix2 value = Matrix2::Zero();
  Matrix2 error = Matrix2::Zero();
};

/// A or B from x, y, z, t of mode a or b:
/// sigma_12 = (<z^2> - <t^2>)/2 - <x><y>.
/// Throws MissingEstimate when the mode or its z/t moments are absent.
BlockEstimate reconstruct_diag_block(const ModeEstimates& est, Mode mode);

/// C from the auxiliary modes c, d, e, f. Without f the identities
/// <x_f^2> = <y_a^2> + <x_b^2> - <x_e^2> and <y_f^2> = <x_a^2> + <y_b^2> - <y_e^2>
/// stand in for the missing moments.
BlockEstimate reconstruct_cross_block(const ModeEstimates& est, bool* used_f_substitution = nullptr);

struct ReconstructedCM {
  Matrix4 sigma = Matrix4::Zero();
  Matrix4 errors = Matrix4::Zero();
  bool used_f_substitution = false;
  bool physical = false;
  /// NaN when sigma is not a positive-definite symmetric matrix.
  double d_minus = 0.0;
  std::vector<std::string> warnings;

  /// Throws if sigma is not positive definite.
  CovarianceMatrix cm() const { return CovarianceMatrix(sigma); }
};

ReconstructedCM reconstruct(const ModeEstimates& est, double tol = kDefaultPhysicalityTol);

/// Raises the errors of sigma_14 and sigma_23 to at least the shift a LO
/// phase error of delta_theta causes in the combination of variances each
/// is built from (y_e, y_f at pi/2 and x_e, x_f at 0, where the variances
/// of e and f are steepest), evaluated on the reconstructed CM.
/// sigma_13, sigma_24 and the diagonal blocks keep their tomographic errors.
void phase_error_inflation(ReconstructedCM& rcm, double delta_theta);

/// Phase-error contribution to the (sigma_14, sigma_23) errors alone.
std::pair<double, double> phase_error_terms(const Matrix4& sigma, double delta_theta,
                                            bool used_f_substitution);

struct GateResult {
  bool accept = false;
  double d_minus = 0.0;
};

/// Rejects iff d_minus < 1/2 - tol (or sigma is not a valid CM).
GateResult physicality_gate(const ReconstructedCM& rcm, double tol = kDefaultPhysicalityTol);

/// Linear error propagation of the element errors through `f`, treating
/// the 10 independent entries as uncorrelated. Central differences.
double propagated_error(const Matrix4& sigma, const Matrix4& errors,
                        const std::function<double(const CovarianceMatrix&)>& f);

}  // namespace twomode
