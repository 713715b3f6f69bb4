#include "twomode/reconstruction.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "twomode/error.hpp"

namespace twomode {
namespace {

using std::numbers::pi;

const ModeMoments& require(const ModeEstimates& est, Mode mode) {
  const auto& m = est[mode];
  if (!m) {
    throw Error(Errc::MissingEstimate, fmt::format("no estimates for mode {}", to_string(mode)));
  }
  return *m;
}

double second(const QuadratureMoments& q) { return q.second.mean; }
double second_err(const QuadratureMoments& q) { return q.second.confidence; }
double mean(const QuadratureMoments& q) { return q.mean.mean; }
double mean_err(const QuadratureMoments& q) { return q.mean.confidence; }

// Error of a product of two means.
double product_err(const QuadratureMoments& p, const QuadratureMoments& q) {
  return std::hypot(mean(p) * mean_err(q), mean(q) * mean_err(p));
}

double quadrature_variance_at(const Matrix4& sigma, Mode mode, double theta) {
  const Vector4 u = mode_quadrature_coefficients(mode, theta);
  return u.dot(sigma * u);
}

// Largest variance shift for a phase excursion of +-delta around theta.
double phase_shift(const Matrix4& sigma, Mode mode, double theta, double delta) {
  const double v0 = quadrature_variance_at(sigma, mode, theta);
  return std::max(std::abs(quadrature_variance_at(sigma, mode, theta + delta) - v0),
                  std::abs(quadrature_variance_at(sigma, mode, theta - delta) - v0));
}

bool uniform(const ModeMoments& m) {
  bool ok = m.x.mean.phase_uniform && m.y.mean.phase_uniform;
  if (m.z) ok = ok && m.z->mean.phase_uniform;
  if (m.t) ok = ok && m.t->mean.phase_uniform;
  return ok;
}

}  // namespace

ModeMoments estimate_mode(const HomodyneTrace& trace, double eta, double electronic_noise_var,
                          bool with_diagonals) {
  ModeMoments m;
  m.x = quadrature_moments(trace, 0.0, eta, electronic_noise_var);
  m.y = quadrature_moments(trace, pi / 2, eta, electronic_noise_var);
  if (with_diagonals) {
    m.z = quadrature_moments(trace, pi / 4, eta, electronic_noise_var);
    m.t = quadrature_moments(trace, -pi / 4, eta, electronic_noise_var);
  }
  return m;
}

BlockEstimate reconstruct_diag_block(const ModeEstimates& est, Mode mode) {
  if (mode != Mode::a && mode != Mode::b) {
    throw Error(Errc::InvalidArgument, "diagonal blocks exist for modes a and b only");
  }
  const auto& m = require(est, mode);
  if (!m.z || !m.t) {
    throw Error(Errc::MissingEstimate,
                fmt::format("mode {} lacks the pi/4 and -pi/4 quadratures", to_string(mode)));
  }
  BlockEstimate out;
  out.value(0, 0) = m.x.variance();
  out.value(1, 1) = m.y.variance();
  out.value(0, 1) = out.value(1, 0) = 0.5 * (second(*m.z) - second(*m.t)) - mean(m.x) * mean(m.y);

  out.error(0, 0) = std::hypot(second_err(m.x), 2.0 * mean(m.x) * mean_err(m.x));
  out.error(1, 1) = std::hypot(second_err(m.y), 2.0 * mean(m.y) * mean_err(m.y));
  out.error(0, 1) = out.error(1, 0) =
      std::hypot(0.5 * std::hypot(second_err(*m.z), second_err(*m.t)), product_err(m.x, m.y));
  return out;
}

BlockEstimate reconstruct_cross_block(const ModeEstimates& est, bool* used_f_substitution) {
  const auto& a = require(est, Mode::a);
  const auto& b = require(est, Mode::b);
  const auto& c = require(est, Mode::c);
  const auto& d = require(est, Mode::d);
  const auto& e = require(est, Mode::e);
  const auto& f = est[Mode::f];

  BlockEstimate out;
  out.value(0, 0) = 0.5 * (second(c.x) - second(d.x)) - mean(a.x) * mean(b.x);
  out.error(0, 0) = std::hypot(0.5 * std::hypot(second_err(c.x), second_err(d.x)),
                               product_err(a.x, b.x));
  out.value(1, 1) = 0.5 * (second(c.y) - second(d.y)) - mean(a.y) * mean(b.y);
  out.error(1, 1) = std::hypot(0.5 * std::hypot(second_err(c.y), second_err(d.y)),
                               product_err(a.y, b.y));

  double e14 = 0.0;
  double e23 = 0.0;
  if (f) {
    out.value(0, 1) = 0.5 * (second(e.y) - second(f->y));
    out.value(1, 0) = 0.5 * (second(f->x) - second(e.x));
    e14 = 0.5 * std::hypot(second_err(e.y), second_err(f->y));
    e23 = 0.5 * std::hypot(second_err(f->x), second_err(e.x));
  } else {
    // <y_f^2> = <x_a^2> + <y_b^2> - <y_e^2>, <x_f^2> = <y_a^2> + <x_b^2> - <x_e^2>
    out.value(0, 1) = second(e.y) - 0.5 * (second(a.x) + second(b.y));
    out.value(1, 0) = 0.5 * (second(a.y) + second(b.x)) - second(e.x);
    e14 = std::sqrt(second_err(e.y) * second_err(e.y) +
                    0.25 * (second_err(a.x) * second_err(a.x) + second_err(b.y) * second_err(b.y)));
    e23 = std::sqrt(second_err(e.x) * second_err(e.x) +
                    0.25 * (second_err(a.y) * second_err(a.y) + second_err(b.x) * second_err(b.x)));
  }
  out.value(0, 1) -= mean(a.x) * mean(b.y);
  out.value(1, 0) -= mean(a.y) * mean(b.x);
  out.error(0, 1) = std::hypot(e14, product_err(a.x, b.y));
  out.error(1, 0) = std::hypot(e23, product_err(a.y, b.x));

  if (used_f_substitution) *used_f_substitution = !f;
  return out;
}

ReconstructedCM reconstruct(const ModeEstimates& est, double tol) {
  const auto block_a = reconstruct_diag_block(est, Mode::a);
  const auto block_b = reconstruct_diag_block(est, Mode::b);
  ReconstructedCM r;
  const auto block_c = reconstruct_cross_block(est, &r.used_f_substitution);

  Matrix4 s;
  s << block_a.value, block_c.value, block_c.value.transpose(), block_b.value;
  r.sigma = 0.5 * (s + s.transpose());
  r.errors << block_a.error, block_c.error, block_c.error.transpose(), block_b.error;

  for (Mode m : kAllModes) {
    if (est[m] && !uniform(*est[m])) {
      r.warnings.push_back(fmt::format("mode {}: phase coverage is not uniform", to_string(m)));
    }
  }

  const auto gate = physicality_gate(r, tol);
  r.physical = gate.accept;
  r.d_minus = gate.d_minus;
  return r;
}

std::pair<double, double> phase_error_terms(const Matrix4& sigma, double delta_theta,
                                            bool used_f_substitution) {
  if (!(delta_theta > 0.0)) return {0.0, 0.0};
  const double ye = phase_shift(sigma, Mode::e, pi / 2, delta_theta);
  const double xe = phase_shift(sigma, Mode::e, 0.0, delta_theta);
  if (!used_f_substitution) {
    const double yf = phase_shift(sigma, Mode::f, pi / 2, delta_theta);
    const double xf = phase_shift(sigma, Mode::f, 0.0, delta_theta);
    return {0.5 * std::hypot(ye, yf), 0.5 * std::hypot(xe, xf)};
  }
  const double xa = phase_shift(sigma, Mode::a, 0.0, delta_theta);
  const double ya = phase_shift(sigma, Mode::a, pi / 2, delta_theta);
  const double xb = phase_shift(sigma, Mode::b, 0.0, delta_theta);
  const double yb = phase_shift(sigma, Mode::b, pi / 2, delta_theta);
  return {std::sqrt(ye * ye + 0.25 * (xa * xa + yb * yb)),
          std::sqrt(xe * xe + 0.25 * (ya * ya + xb * xb))};
}

void phase_error_inflation(ReconstructedCM& rcm, double delta_theta) {
  if (delta_theta < 0.0) throw Error(Errc::InvalidArgument, "delta_theta must be >= 0");
  const auto [p14, p23] = phase_error_terms(rcm.sigma, delta_theta, rcm.used_f_substitution);
  rcm.errors(0, 3) = rcm.errors(3, 0) = std::max(rcm.errors(0, 3), p14);
  rcm.errors(1, 2) = rcm.errors(2, 1) = std::max(rcm.errors(1, 2), p23);
}

GateResult physicality_gate(const ReconstructedCM& rcm, double tol) {
  GateResult g;
  g.d_minus = std::numeric_limits<double>::quiet_NaN();
  try {
    const CovarianceMatrix cm(rcm.sigma);
    g.d_minus = symplectic_spectrum(cm).d_minus;
    g.accept = g.d_minus >= 0.5 - tol;
  } catch (const Error&) {
    g.accept = false;
  }
  return g;
}

double propagated_error(const Matrix4& sigma, const Matrix4& errors,
                        const std::function<double(const CovarianceMatrix&)>& f) {
  double var = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      const double err = errors(i, j);
      if (!(err > 0.0)) continue;
      const double h = 1e-3 * err;
      Matrix4 up = sigma;
      Matrix4 down = sigma;
      up(i, j) += h;
      down(i, j) -= h;
      if (i != j) {
        up(j, i) = up(i, j);
        down(j, i) = down(i, j);
      }
      double slope = 0.0;
      try {
        slope = (f(CovarianceMatrix(up)) - f(CovarianceMatrix(down))) / (2.0 * h);
      } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
      var += slope * slope * err * err;
    }
  }
  return std::sqrt(var);
}

}  // namespace twomode
