#pragma once

#include <array>
#include <span>

#include <Eigen/Core>

namespace twomode {

using Matrix2 = Eigen::Matrix2d;
using Matrix4 = Eigen::Matrix4d;
using Vector4 = Eigen::Vector4d;

/// Variance of a vacuum quadrature in shot-noise units.
inline constexpr double kVacuumVariance = 0.5;

/// Two-mode quadrature covariance matrix, ordering (x_a, y_a, x_b, y_b),
/// normalized so that the vacuum has 1/2 on the diagonal.
///
/// The stored matrix is exactly symmetric and positive definite. Input
/// that is asymmetric beyond `symmetry_tol` is rejected; smaller
/// asymmetry is averaged away.
class CovarianceMatrix {
 public:
  static constexpr double kDefaultSymmetryTol = 1e-9;

  explicit CovarianceMatrix(const Matrix4& entries, double symmetry_tol = kDefaultSymmetryTol);

  /// Row-major 16 entries.
  static CovarianceMatrix from_row_major(std::span<const double> entries,
                                         double symmetry_tol = kDefaultSymmetryTol);
  static CovarianceMatrix vacuum();
  static CovarianceMatrix diagonal(double xa, double ya, double xb, double yb);

  const Matrix4& matrix() const noexcept { return m_; }
  double operator()(int row, int col) const { return m_(row, col); }

  Matrix2 block_a() const { return m_.topLeftCorner<2, 2>(); }
  Matrix2 block_b() const { return m_.bottomRightCorner<2, 2>(); }
  Matrix2 block_c() const { return m_.topRightCorner<2, 2>(); }

  std::array<double, 16> row_major() const;

  /// Congruence S * sigma * S^T.
  CovarianceMatrix transformed(const Matrix4& s) const;

 private:
  Matrix4 m_;
};

/// Two-mode symplectic form Omega = omega (+) omega, omega = adiag[1,-1].
Matrix4 symplectic_form();

}  // namespace twomode
