#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Core>

#include "twomode/covariance.hpp"

namespace twomode {

inline constexpr int kMaxLaguerreOrder = 512;
inline constexpr int kMaxQuadratureNodes = 128;

/// L_n(x) by the three-term recurrence. Throws OrderTooLarge for n > 512
/// and InvalidArgument for n < 0.
double laguerre(int n, double x);

/// chi(lambda1, lambda2) = Tr[rho D(lambda1) D(lambda2)] for a zero-mean
/// Gaussian state: exp(-w^T sigma w) with
/// w = (Im l1, -Re l1, Im l2, -Re l2). A thermal mode gives
/// exp(-(nbar + 1/2)|lambda|^2).
std::complex<double> gaussian_characteristic(const CovarianceMatrix& cm, std::complex<double> lambda1,
                                             std::complex<double> lambda2);

struct JointPMF {
  Eigen::MatrixXd probs;    ///< probs(n, m), clipped to >= 0
  double deficit = 0.0;     ///< 1 - sum(probs)
  std::size_t clipped = 0;  ///< entries in [-1e-10, 0) set to zero
  int nodes_per_axis = 0;   ///< Gauss-Hermite order of the returned result
};

struct SingleModePMF {
  Eigen::VectorXd probs;
  double deficit = 0.0;
  std::size_t clipped = 0;
  int nodes_per_axis = 0;
};

/// p(n, m) = pi^-2 Int d^2l1 d^2l2 chi(l1, l2) chi_n(-l1) chi_m(-l2),
/// chi_n(l) = exp(-|l|^2/2) L_n(|l|^2), by tensor Gauss-Hermite quadrature
/// over the Gaussian envelope. The integrand is polynomial times that
/// envelope, so n_max + m_max + 1 nodes per axis are already exact; the
/// result is cross-checked against twice as many nodes (capped at 128).
/// Throws QuadratureNotConverged when the two differ by more than 1e-6 in
/// total variation, or when an entry is below -1e-10.
JointPMF joint_pnm(const CovarianceMatrix& cm, int n_max, int m_max);

/// Single-mode analogue for a 2x2 CM with sqrt(det) >= 1/2.
SingleModePMF single_pnm(const Matrix2& cm, int n_max);

}  // namespace twomode
