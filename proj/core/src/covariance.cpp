#include "twomode/covariance.hpp"

#include <cmath>

#include <Eigen/LU>
#include <fmt/format.h>

#include "twomode/error.hpp"

namespace twomode {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::NegativeRadicand: return "NegativeRadicand";
    case Errc::NoRealSolution: return "NoRealSolution";
    case Errc::DomainError: return "DomainError";
    case Errc::DuanUndefined: return "DuanUndefined";
    case Errc::DegenerateSample: return "DegenerateSample";
    case Errc::SampleSizeOutOfRange: return "SampleSizeOutOfRange";
    case Errc::EmptyBin: return "EmptyBin";
    case Errc::EmptyTrace: return "EmptyTrace";
    case Errc::EfficiencyOutOfRange: return "EfficiencyOutOfRange";
    case Errc::MissingEstimate: return "MissingEstimate";
    case Errc::OrderTooLarge: return "OrderTooLarge";
    case Errc::QuadratureNotConverged: return "QuadratureNotConverged";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

CovarianceMatrix::CovarianceMatrix(const Matrix4& entries, double symmetry_tol) {
  if (!entries.allFinite()) {
    throw Error(Errc::InvalidArgument, "covariance matrix has non-finite entries");
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const double diff = std::abs(entries(i, j) - entries(j, i));
      if (diff > symmetry_tol) {
        throw Error(Errc::NotSymmetric,
                    fmt::format("entries ({},{}) and ({},{}) differ by {:.3g}", i, j, j, i, diff));
      }
    }
  }
  m_ = 0.5 * (entries + entries.transpose());

  // Leading principal minors.
  for (int k = 1; k <= 4; ++k) {
    const double minor = m_.topLeftCorner(k, k).determinant();
    if (!(minor > 0.0)) {
      throw Error(Errc::NotPositiveDefinite,
                  fmt::format("leading principal minor of order {} is {:.6g}", k, minor));
    }
  }
}

CovarianceMatrix CovarianceMatrix::from_row_major(std::span<const double> entries,
                                                  double symmetry_tol) {
  if (entries.size() != 16) {
    throw Error(Errc::InvalidArgument,
                fmt::format("expected 16 covariance entries, got {}", entries.size()));
  }
  Matrix4 m;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      m(i, j) = entries[static_cast<std::size_t>(4 * i + j)];
    }
  }
  return CovarianceMatrix(m, symmetry_tol);
}

CovarianceMatrix CovarianceMatrix::vacuum() {
  return CovarianceMatrix(kVacuumVariance * Matrix4::Identity());
}

CovarianceMatrix CovarianceMatrix::diagonal(double xa, double ya, double xb, double yb) {
  return CovarianceMatrix(Vector4(xa, ya, xb, yb).asDiagonal().toDenseMatrix());
}

std::array<double, 16> CovarianceMatrix::row_major() const {
  std::array<double, 16> out{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      out[static_cast<std::size_t>(4 * i + j)] = m_(i, j);
    }
  }
  return out;
}

CovarianceMatrix CovarianceMatrix::transformed(const Matrix4& s) const {
  const Matrix4 out = s * m_ * s.transpose();
  return CovarianceMatrix(0.5 * (out + out.transpose()));
}

Matrix4 symplectic_form() {
  Matrix4 omega = Matrix4::Zero();
  omega(0, 1) = 1.0;
  omega(1, 0) = -1.0;
  omega(2, 3) = 1.0;
  omega(3, 2) = -1.0;
  return omega;
}

}  // namespace twomode
