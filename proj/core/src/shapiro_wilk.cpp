// Shapiro-Wilk W test following Royston (1995), Applied Statistics
// algorithm AS R94, restricted to uncensored samples.

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "twomode/error.hpp"
#include "twomode/gaussianity.hpp"

namespace twomode {
namespace {

// Horner evaluation of c[0] + c[1] x + ... + c[k-1] x^(k-1).
template <std::size_t N>
double poly(const double (&c)[N], double x) {
  double r = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) r = r * x + c[i];
  return r;
}

constexpr double kC1[] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
constexpr double kC2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
constexpr double kC3[] = {0.5440, -0.39978, 0.025054, -6.714e-4};
constexpr double kC4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
constexpr double kC5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
constexpr double kC6[] = {-0.4803, -0.082676, 0.0030302};
constexpr double kG[] = {-2.273, 0.459};

const boost::math::normal_distribution<double> kStdNormal{};

// Weights a_1..a_{n/2} for the lower half of the ordered sample; a_i > 0.
std::vector<double> royston_weights(std::size_t n) {
  const std::size_t half = n / 2;
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::sqrt(0.5);
    return a;
  }
  const double an = static_cast<double>(n);
  std::vector<double> m(half);
  double summ2 = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    m[i] = boost::math::quantile(kStdNormal, (static_cast<double>(i + 1) - 0.375) / (an + 0.25));
    summ2 += m[i] * m[i];
  }
  summ2 *= 2.0;
  const double ssumm2 = std::sqrt(summ2);
  const double rsn = 1.0 / std::sqrt(an);
  const double a1 = poly(kC1, rsn) - m[0] / ssumm2;

  std::size_t first = 1;
  double fac = 0.0;
  if (n > 5) {
    first = 2;
    const double a2 = -m[1] / ssumm2 + poly(kC2, rsn);
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) /
                    (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
    a[1] = a2;
  } else {
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
  }
  a[0] = a1;
  for (std::size_t i = first; i < half; ++i) a[i] = -m[i] / fac;
  return a;
}

double royston_p_value(std::size_t n, double w) {
  const double an = static_cast<double>(n);
  if (n == 3) {
    constexpr double kPi6 = 1.90985931710274;   // 6 / pi
    constexpr double kStqr = 1.04719755119660;  // pi / 3
    const double pw = kPi6 * (std::asin(std::sqrt(std::clamp(w, 0.0, 1.0))) - kStqr);
    return std::clamp(pw, 0.0, 1.0);
  }
  const double w1 = 1.0 - w;
  if (w1 <= 0.0) return 1.0;
  double y = std::log(w1);
  double mean = 0.0;
  double sd = 0.0;
  if (n <= 11) {
    const double gamma = poly(kG, an);
    if (y >= gamma) return 1e-99;
    y = -std::log(gamma - y);
    mean = poly(kC3, an);
    sd = std::exp(poly(kC4, an));
  } else {
    const double ln_n = std::log(an);
    mean = poly(kC5, ln_n);
    sd = std::exp(poly(kC6, ln_n));
  }
  return boost::math::cdf(boost::math::complement(kStdNormal, (y - mean) / sd));
}

}  // namespace

ShapiroWilkResult shapiro_wilk(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < kShapiroWilkMinN || n > kShapiroWilkMaxN) {
    throw Error(Errc::SampleSizeOutOfRange,
                fmt::format("Shapiro-Wilk needs {} <= n <= {}, got {}", kShapiroWilkMinN,
                            kShapiroWilkMaxN, n));
  }
  std::vector<double> x(samples.begin(), samples.end());
  std::stable_sort(x.begin(), x.end());

  const double range = x.back() - x.front();
  if (!(range > 0.0)) throw Error(Errc::DegenerateSample, "sample has zero range");
  std::size_t longest_tie = 1;
  for (std::size_t i = 1, run = 1; i < n; ++i) {
    run = (x[i] == x[i - 1]) ? run + 1 : 1;
    longest_tie = std::max(longest_tie, run);
  }
  if (2 * longest_tie > n) {
    throw Error(Errc::DegenerateSample,
                fmt::format("{} of {} values are identical", longest_tie, n));
  }

  const auto a = royston_weights(n);
  // Full antisymmetric coefficient vector over the ordered sample.
  std::vector<double> coef(n, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    coef[i] = -a[i];
    coef[n - 1 - i] = a[i];
  }

  // W as the squared correlation between coefficients and the (range-
  // scaled) ordered sample, which is numerically safer than the raw ratio.
  double mean_c = 0.0;
  double mean_x = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_c += coef[i];
    mean_x += x[i] / range;
  }
  mean_c /= static_cast<double>(n);
  mean_x /= static_cast<double>(n);
  double ssa = 0.0;
  double ssx = 0.0;
  double sax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dc = coef[i] - mean_c;
    const double dx = x[i] / range - mean_x;
    ssa += dc * dc;
    ssx += dx * dx;
    sax += dc * dx;
  }
  const double root = std::sqrt(ssa * ssx);
  const double w1 = (root - sax) * (root + sax) / (ssa * ssx);
  const double w = std::clamp(1.0 - w1, 0.0, 1.0);
  return {w, royston_p_value(n, w)};
}

}  // namespace twomode
