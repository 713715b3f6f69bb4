#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "twomode/covariance.hpp"
#include "twomode/synthesis.hpp"

namespace twomode::fixtures {

inline CovarianceMatrix published_typical() {
  const std::array<double, 16> v{1.694, 0.000, 1.204, -0.02,  0.000, 1.694, 0.02,  -1.232,
                                 1.204, 0.02,  1.671, 0.000,  -0.02, -1.232, 0.000, 1.671};
  return CovarianceMatrix::from_row_major(v);
}

inline CovarianceMatrix published_strong() {
  const std::array<double, 16> v{2.107, 0.000, 1.830, -0.1,  0.000, 2.107, 0.08,  -1.573,
                                 1.830, 0.08,  1.867, 0.000, -0.1,  -1.573, 0.000, 1.867};
  return CovarianceMatrix::from_row_major(v);
}

inline CovarianceMatrix twin_beam(double r) { return cm_from_model({.zeta = r}); }

inline Matrix2 rotation(double phi) {
  Matrix2 r;
  r << std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi);
  return r;
}

inline Matrix2 squeezer(double s) { return Eigen::Vector2d(std::exp(s), std::exp(-s)).asDiagonal(); }

/// Random element of Sp(2) x Sp(2) (Euler decomposition per mode).
template <class Rng>
Matrix4 random_local_symplectic(Rng& rng, double max_squeeze = 0.8) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> sq(-max_squeeze, max_squeeze);
  Matrix4 s = Matrix4::Zero();
  s.topLeftCorner<2, 2>() = rotation(phase(rng)) * squeezer(sq(rng)) * rotation(phase(rng));
  s.bottomRightCorner<2, 2>() = rotation(phase(rng)) * squeezer(sq(rng)) * rotation(phase(rng));
  return s;
}

/// Physical CM: local * mixer * two-mode squeezer * local acting on a
/// thermal product with symplectic eigenvalues in [1/2, 1/2 + max_nbar].
template <class Rng>
CovarianceMatrix random_physical_cm(Rng& rng, double max_nbar = 1.5, double max_zeta = 1.2) {
  std::uniform_real_distribution<double> nbar(0.0, max_nbar);
  std::uniform_real_distribution<double> zeta(0.0, max_zeta);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double n1 = 0.5 + nbar(rng);
  const double n2 = 0.5 + nbar(rng);
  const Matrix4 thermal = Vector4(n1, n1, n2, n2).asDiagonal();
  const Matrix4 s = random_local_symplectic(rng) * mode_mixer(angle(rng), angle(rng)).matrix *
                    two_mode_squeezer(zeta(rng)).matrix * random_local_symplectic(rng);
  const Matrix4 sigma = s * thermal * s.transpose();
  return CovarianceMatrix(0.5 * (sigma + sigma.transpose()));
}

}  // namespace twomode::fixtures
