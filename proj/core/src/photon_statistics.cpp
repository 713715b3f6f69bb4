#include "twomode/photon_statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <fmt/format.h>

#include "twomode/error.hpp"

namespace twomode {
namespace {

constexpr double kClipFloor = -1e-10;
constexpr double kTotalVariationTol = 1e-6;
// Nodes whose weight times the Laguerre magnitude bound falls below this
// contribute nothing at double precision.
constexpr double kPruneTol = 1e-18;

struct GaussHermite {
  std::vector<double> x;
  std::vector<double> w;
};

// Orthonormal Hermite functions psi_{n-1}(x), psi_n(x) for the weight exp(-x^2).
std::pair<double, double> hermite_pair(int n, double x) {
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25);
  for (int k = 0; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1.0)) * x * cur - std::sqrt(k / (k + 1.0)) * prev;
    prev = cur;
    cur = next;
  }
  return {prev, cur};
}

// Golub-Welsch for the nodes, one Newton polish, then Christoffel weights
// 1 / (n psi_{n-1}^2). Eigenvector-based weights lose all relative accuracy
// in the tails, where the Laguerre factors are largest.
GaussHermite gauss_hermite(int k) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(k, k);
  for (int i = 1; i < k; ++i) jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(0.5 * i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi, Eigen::EigenvaluesOnly);
  GaussHermite gh;
  gh.x.resize(k);
  gh.w.resize(k);
  for (int i = 0; i < k; ++i) {
    double x = eig.eigenvalues()(i);
    for (int it = 0; it < 2; ++it) {
      const auto [pm1, p] = hermite_pair(k, x);
      x -= p / (std::sqrt(2.0 * k) * pm1);
    }
    const double pm1 = hermite_pair(k, x).first;
    gh.x[i] = x;
    gh.w[i] = 1.0 / (k * pm1 * pm1);
  }
  return gh;
}

void fill_laguerre(int n_max, double x, double* out) {
  out[0] = 1.0;
  if (n_max >= 1) out[1] = 1.0 - x;
  for (int k = 1; k < n_max; ++k) {
    out[k + 1] = ((2.0 * k + 1.0 - x) * out[k] - k * out[k - 1]) / (k + 1.0);
  }
}

void check_order(int n) {
  if (n < 0) throw Error(Errc::InvalidArgument, fmt::format("negative Laguerre order {}", n));
  if (n > kMaxLaguerreOrder) {
    throw Error(Errc::OrderTooLarge,
                fmt::format("Laguerre order {} exceeds {}", n, kMaxLaguerreOrder));
  }
}

// Raw quadrature sum for the two-mode integral with k nodes per axis.
// M = sigma + I/2 = L L^T and w = L^-T z turn the envelope into exp(-|z|^2).
Eigen::MatrixXd joint_sum(const Matrix4& sigma, int n_max, int m_max, int k) {
  const Matrix4 m = sigma + 0.5 * Matrix4::Identity();
  const Eigen::LLT<Matrix4> llt(m);
  const Matrix4 l = llt.matrixL();
  const Matrix4 map = l.transpose().inverse();  // w = map * z
  const double jacobian = 1.0 / (std::numbers::pi * std::numbers::pi * l.diagonal().prod());

  const auto gh = gauss_hermite(k);
  const int rows = n_max + 1;
  const int cols = m_max + 1;
  const int inner = k * k;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(rows, cols);
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor la(inner, rows);
  RowMajor lb(inner, cols);
  Eigen::VectorXd wt(inner);

  for (int i0 = 0; i0 < k; ++i0) {
    for (int i1 = 0; i1 < k; ++i1) {
      const double w01 = gh.w[i0] * gh.w[i1];
      int used = 0;
      for (int i2 = 0; i2 < k; ++i2) {
        for (int i3 = 0; i3 < k; ++i3) {
          const double weight = w01 * gh.w[i2] * gh.w[i3];
          const Eigen::Vector4d z(gh.x[i0], gh.x[i1], gh.x[i2], gh.x[i3]);
          const Eigen::Vector4d w = map * z;
          const double ra = w(0) * w(0) + w(1) * w(1);
          const double rb = w(2) * w(2) + w(3) * w(3);
          // |L_n(x)| <= exp(x/2) for x >= 0.
          if (weight * std::exp(0.5 * (ra + rb)) < kPruneTol) continue;
          fill_laguerre(n_max, ra, la.row(used).data());
          fill_laguerre(m_max, rb, lb.row(used).data());
          wt(used) = weight;
          ++used;
        }
      }
      if (used == 0) continue;
      acc.noalias() += la.topRows(used).transpose() * wt.head(used).asDiagonal() *
                       lb.topRows(used);
    }
  }
  return jacobian * acc;
}

Eigen::VectorXd single_sum(const Matrix2& sigma, int n_max, int k) {
  const Matrix2 m = sigma + 0.5 * Matrix2::Identity();
  const Eigen::LLT<Matrix2> llt(m);
  const Matrix2 l = llt.matrixL();
  const Matrix2 map = l.transpose().inverse();
  const double jacobian = 1.0 / (std::numbers::pi * l.diagonal().prod());

  const auto gh = gauss_hermite(k);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n_max + 1);
  Eigen::VectorXd lag(n_max + 1);
  for (int i0 = 0; i0 < k; ++i0) {
    for (int i1 = 0; i1 < k; ++i1) {
      const Eigen::Vector2d w = map * Eigen::Vector2d(gh.x[i0], gh.x[i1]);
      const double r = w.squaredNorm();
      const double weight = gh.w[i0] * gh.w[i1];
      if (weight * std::exp(0.5 * r) < kPruneTol) continue;
      fill_laguerre(n_max, r, lag.data());
      acc += weight * lag;
    }
  }
  return jacobian * acc;
}

template <class Dense>
double total_variation(const Dense& p, const Dense& q) {
  return 0.5 * (p - q).cwiseAbs().sum();
}

// Clip the quadrature noise floor; anything more negative is a failure.
template <class Dense>
std::size_t clip(Dense& p) {
  std::size_t clipped = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    double& v = p.data()[i];
    if (v >= 0.0) continue;
    if (v < kClipFloor) {
      throw Error(Errc::QuadratureNotConverged,
                  fmt::format("negative probability {:.3g} at flat index {}", v, i));
    }
    v = 0.0;
    ++clipped;
  }
  return clipped;
}

std::pair<int, int> node_counts(int degree_sum) {
  const int first = std::min(degree_sum + 2, kMaxQuadratureNodes);
  return {first, std::min(2 * first, kMaxQuadratureNodes)};
}

}  // namespace

double laguerre(int n, double x) {
  check_order(n);
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

std::complex<double> gaussian_characteristic(const CovarianceMatrix& cm, std::complex<double> lambda1,
                                             std::complex<double> lambda2) {
  const Vector4 w(lambda1.imag(), -lambda1.real(), lambda2.imag(), -lambda2.real());
  return {std::exp(-w.dot(cm.matrix() * w)), 0.0};
}

JointPMF joint_pnm(const CovarianceMatrix& cm, int n_max, int m_max) {
  check_order(n_max);
  check_order(m_max);
  const auto [k1, k2] = node_counts(n_max + m_max);
  const Eigen::MatrixXd coarse = joint_sum(cm.matrix(), n_max, m_max, k1);
  JointPMF out;
  out.probs = joint_sum(cm.matrix(), n_max, m_max, k2);
  out.nodes_per_axis = k2;
  const double tv = total_variation(coarse, out.probs);
  if (tv > kTotalVariationTol) {
    throw Error(Errc::QuadratureNotConverged,
                fmt::format("{} and {} nodes per axis differ by {:.3g} in total variation", k1,
                            k2, tv));
  }
  out.clipped = clip(out.probs);
  out.deficit = 1.0 - out.probs.sum();
  return out;
}

SingleModePMF single_pnm(const Matrix2& cm, int n_max) {
  check_order(n_max);
  if (!cm.allFinite() || std::abs(cm(0, 1) - cm(1, 0)) > 1e-9) {
    throw Error(Errc::NotSymmetric, "single-mode CM must be finite and symmetric");
  }
  if (!(cm(0, 0) > 0.0) || !(std::sqrt(cm.determinant()) >= 0.5 - 1e-9)) {
    throw Error(Errc::NotPositiveDefinite, "single-mode CM violates sqrt(det) >= 1/2");
  }
  const auto [k1, k2] = node_counts(2 * n_max);
  const Eigen::VectorXd coarse = single_sum(cm, n_max, k1);
  SingleModePMF out;
  out.probs = single_sum(cm, n_max, k2);
  out.nodes_per_axis = k2;
  const double tv = total_variation(coarse, out.probs);
  if (tv > kTotalVariationTol) {
    throw Error(Errc::QuadratureNotConverged,
                fmt::format("{} and {} nodes per axis differ by {:.3g} in total variation", k1,
                            k2, tv));
  }
  out.clipped = clip(out.probs);
  out.deficit = 1.0 - out.probs.sum();
  return out;
}

}  // namespace twomode
