#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"
#include "twomode/error.hpp"
#include "twomode/gaussianity.hpp"

using namespace twomode;

namespace {

struct Reference {
  std::vector<double> data;
  double w;
  double p;
};

// W and p frozen from scipy.stats.shapiro (same AS R94 algorithm).
std::vector<Reference> references() {
  std::vector<Reference> out;
  out.push_back({{1.0, 2.0, 4.0}, 0.9642857142857142, 0.6368868450289689});
  out.push_back({{148, 154, 158, 160, 161, 162, 166, 170, 182, 195, 236}, 0.7888146948631716,
                 0.006703814061898823});
  std::vector<double> n20, n100, n1000;
  for (int i = 0; i < 20; ++i) n20.push_back((i * i) % 17 + 0.1 * i);
  for (int i = 0; i < 100; ++i) n100.push_back(std::sin(0.37 * i) + 0.01 * i);
  for (int i = 0; i < 1000; ++i) n1000.push_back(std::exp(std::sin(static_cast<double>(i))));
  out.push_back({n20, 0.9074812340643622, 0.05707867295645465});
  out.push_back({n100, 0.966407114006868, 0.011816737955095302});
  out.push_back({n1000, 0.8663058311039517, 2.3334998006617815e-28});
  return out;
}

HomodyneTrace gaussian_trace(std::size_t n, std::uint64_t seed) {
  MeasurementConfig mc;
  mc.mode = Mode::c;
  mc.n_samples = n;
  mc.seed = seed;
  return sample_trace(fixtures::twin_beam(0.4), mc);
}

}  // namespace

TEST(ShapiroWilk, MatchesReferenceImplementation) {
  for (const auto& ref : references()) {
    const auto r = shapiro_wilk(ref.data);
    EXPECT_NEAR(r.w, ref.w, 2e-5) << "n=" << ref.data.size();
    EXPECT_NEAR(r.p, ref.p, 2e-3 * ref.p + 1e-12) << "n=" << ref.data.size();
  }
}

TEST(ShapiroWilk, InvariantUnderAffineMaps) {
  const auto ref = references()[3];
  std::vector<double> moved;
  for (double v : ref.data) moved.push_back(-3.0 * v + 1e4);
  const auto a = shapiro_wilk(ref.data);
  const auto b = shapiro_wilk(moved);
  EXPECT_NEAR(a.w, b.w, 1e-10);
  EXPECT_NEAR(a.p, b.p, 1e-8);
}

TEST(ShapiroWilk, Errors) {
  const auto code = [](std::vector<double> v) {
    try {
      shapiro_wilk(v);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  EXPECT_EQ(code({1.0, 2.0}), Errc::SampleSizeOutOfRange);
  EXPECT_EQ(code(std::vector<double>(5001, 1.0)), Errc::SampleSizeOutOfRange);
  EXPECT_EQ(code({2.0, 2.0, 2.0, 2.0}), Errc::DegenerateSample);
  EXPECT_EQ(code({1.0, 1.0, 1.0, 2.0, 3.0}), Errc::DegenerateSample);
}

TEST(Kurtosis, ReferenceAndErrors) {
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) v.push_back(std::sin(0.37 * i) + 0.01 * i);
  EXPECT_NEAR(kurtosis_excess(v), -1.1056046684827219, 1e-12);  // scipy, bias=True
  EXPECT_THROW(kurtosis_excess(std::vector<double>{1, 2, 3}), Error);
  EXPECT_THROW(kurtosis_excess(std::vector<double>(10, 4.0)), Error);
}

TEST(Kurtosis, LargeGaussianSample) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01;
  std::vector<double> v(100000);
  for (auto& x : v) x = n01(rng);
  EXPECT_LT(std::abs(kurtosis_excess(v)), 3 * std::sqrt(24.0 / 1e5));
}

TEST(PhaseBinning, WrapsAndCenters) {
  PhaseBinning b;
  EXPECT_EQ(b.bin_of(0.0), 0u);
  EXPECT_EQ(b.bin_of(2 * std::numbers::pi - 1e-9), 103u);
  EXPECT_EQ(b.bin_of(2 * std::numbers::pi + 1e-9), 0u);
  EXPECT_EQ(b.bin_of(-1e-9), 103u);
  EXPECT_NEAR(b.center(0), b.width() / 2, 1e-15);
}

TEST(GaussianityReport, GaussianTracePassesCorrectedRule) {
  const auto rep = gaussianity_report(gaussian_trace(104 * 400, 1), PhaseBinning{});
  ASSERT_EQ(rep.bins.size(), 104u);
  EXPECT_TRUE(rep.pass_bonferroni);
  EXPECT_LT(rep.n_rejected, 20u);
  EXPECT_LT(rep.max_abs_gamma, 1.5);
  std::size_t total = 0;
  for (const auto& b : rep.bins) {
    EXPECT_NEAR(static_cast<double>(b.n), 400.0, 1.0);  // rounding at bin edges
    total += b.n;
  }
  EXPECT_EQ(total, 104u * 400u);
}

TEST(GaussianityReport, FoldedNormalFails) {
  auto t = gaussian_trace(104 * 400, 2);
  for (auto& s : t.samples) s.x = std::abs(s.x);
  const auto rep = gaussianity_report(t, PhaseBinning{});
  EXPECT_FALSE(rep.pass);
  EXPECT_FALSE(rep.pass_bonferroni);
  EXPECT_EQ(rep.n_rejected, 104u);
}

TEST(GaussianityReport, EmptyBin) {
  try {
    gaussianity_report(gaussian_trace(200, 3), PhaseBinning{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyBin);
  }
}

TEST(GaussianityReport, SubsamplesLargeBins) {
  const auto rep = gaussianity_report(gaussian_trace(2 * 6000, 4), PhaseBinning{2});
  for (const auto& b : rep.bins) EXPECT_EQ(b.n, kShapiroWilkMaxN);
}
