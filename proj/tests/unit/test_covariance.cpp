#include <array>
#include <random>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "support.hpp"
#include "twomode/error.hpp"
#include "twomode/gaussian.hpp"

using namespace twomode;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no twomode::Error thrown";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(CovarianceMatrix, RowMajorRoundTrip) {
  const auto cm = fixtures::published_typical();
  const auto rm = cm.row_major();
  EXPECT_DOUBLE_EQ(rm[2], 1.204);
  EXPECT_DOUBLE_EQ(rm[7], -1.232);
  EXPECT_EQ(CovarianceMatrix::from_row_major(rm).matrix(), cm.matrix());
}

TEST(CovarianceMatrix, RejectsAsymmetry) {
  Matrix4 m = 0.5 * Matrix4::Identity();
  m(0, 2) = 0.1;
  EXPECT_EQ(code_of([&] { CovarianceMatrix c(m); }), Errc::NotSymmetric);
}

TEST(CovarianceMatrix, TinyAsymmetryIsAveraged) {
  Matrix4 m = Matrix4::Identity();
  m(0, 2) = 0.1;
  m(2, 0) = 0.1 + 5e-10;
  const CovarianceMatrix c(m);
  EXPECT_EQ(c(0, 2), c(2, 0));
}

TEST(CovarianceMatrix, RejectsIndefinite) {
  EXPECT_EQ(code_of([] { CovarianceMatrix::diagonal(0.5, -0.1, 0.5, 0.5); }),
            Errc::NotPositiveDefinite);
  Matrix4 m = 0.5 * Matrix4::Identity();
  m(0, 2) = m(2, 0) = 0.6;
  EXPECT_EQ(code_of([&] { CovarianceMatrix c(m); }), Errc::NotPositiveDefinite);
}

TEST(CovarianceMatrix, RejectsNonFinite) {
  Matrix4 m = Matrix4::Identity();
  m(1, 1) = std::nan("");
  EXPECT_EQ(code_of([&] { CovarianceMatrix c(m); }), Errc::InvalidArgument);
}

TEST(CovarianceMatrix, Blocks) {
  const auto cm = fixtures::published_strong();
  EXPECT_DOUBLE_EQ(cm.block_a()(0, 0), 2.107);
  EXPECT_DOUBLE_EQ(cm.block_b()(1, 1), 1.867);
  EXPECT_DOUBLE_EQ(cm.block_c()(0, 1), -0.1);
  EXPECT_DOUBLE_EQ(cm.block_c()(1, 0), 0.08);
}

TEST(CovarianceMatrix, SymplecticFormIsAntisymmetricInvolution) {
  const Matrix4 omega = symplectic_form();
  EXPECT_EQ(omega.transpose(), -omega);
  EXPECT_EQ(omega * omega, -Matrix4::Identity());
  EXPECT_EQ(omega(0, 1), 1.0);
  EXPECT_EQ(omega(3, 2), -1.0);
}

TEST(CovarianceMatrix, CongruenceByLocalSymplecticKeepsDeterminant) {
  std::mt19937_64 rng(7);
  const auto cm = fixtures::published_typical();
  for (int i = 0; i < 20; ++i) {
    const Matrix4 s = fixtures::random_local_symplectic(rng);
    const Matrix4 defect = s * symplectic_form() * s.transpose() - symplectic_form();
    ASSERT_LT(defect.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(cm.transformed(s).matrix().determinant(), cm.matrix().determinant(), 1e-10);
  }
}
