#include "twomode/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <fmt/format.h>

#include "twomode/error.hpp"

namespace twomode {
namespace {

// Relative slack before a negative radicand or discriminant is treated as
// a genuine failure rather than rounding.
constexpr double kRoundingSlack = 1e-12;

double clamped_sqrt_radicand(double radicand, double scale, const char* what) {
  if (radicand >= 0.0) return std::sqrt(radicand);
  if (radicand > -kRoundingSlack * std::max(scale, 1.0)) return 0.0;
  throw Error(Errc::NegativeRadicand, fmt::format("{} radicand is {:.6g}", what, radicand));
}

std::pair<double, double> eigen_pair(double delta, double i4, const char* what) {
  const double root = clamped_sqrt_radicand(delta * delta - 4.0 * i4, delta * delta, what);
  const double lo = std::max(0.0, 0.5 * (delta - root));
  const double hi = 0.5 * (delta + root);
  return {std::sqrt(lo), std::sqrt(hi)};
}

// Duan's second standard form, built in vacuum = 1 units from the
// (first) standard form by local squeezings x_a -> sqrt(r1) x_a,
// y_a -> y_a / sqrt(r1), and likewise r2 on mode b. r2 follows from the
// equal-ratio condition (n1-1)/(m1-1) = (n2-1)/(m2-1); r1 solves
// |c1'| - |c2'| = sqrt((n1-1)(m1-1)) - sqrt((n2-1)(m2-1)).
struct DuanForm2 {
  double variance = 0.0;
  double bound = 0.0;
  bool entangled = false;
};

DuanForm2 duan_second_form(const StandardForm& sf) {
  const double big_n = 2.0 * sf.n;
  const double big_m = 2.0 * sf.m;
  const double k1 = 2.0 * std::abs(sf.c1);
  const double k2 = 2.0 * std::abs(sf.c2);

  // A pure marginal forces a product state.
  if (big_n <= 1.0 + 1e-12 || big_m <= 1.0 + 1e-12) {
    return {2.0, 2.0, false};
  }

  auto r2_of = [&](double r1) {
    const double alpha = big_n / r1 - 1.0;
    const double beta = big_n * r1 - 1.0;
    const double b = beta - alpha;
    const double disc = std::sqrt(b * b + 4.0 * alpha * beta * big_m * big_m);
    if (b >= 0.0) return 2.0 * beta * big_m / (b + disc);
    return (disc - b) / (2.0 * alpha * big_m);
  };
  auto gap = [&](double t) {
    const double r1 = std::exp(t);
    const double r2 = r2_of(r1);
    const double q = std::sqrt(r1 * r2);
    const double p1 = std::max(0.0, (big_n * r1 - 1.0) * (big_m * r2 - 1.0));
    const double p2 = std::max(0.0, (big_n / r1 - 1.0) * (big_m / r2 - 1.0));
    return k1 * q - k2 / q - std::sqrt(p1) + std::sqrt(p2);
  };

  double lo = 0.0;
  double hi = std::log(big_n) * (1.0 - 1e-12);
  double g_lo = gap(lo);
  double g_hi = gap(hi);
  double t = 0.0;
  if (g_lo <= 0.0) {
    t = 0.0;
  } else if (g_hi > 0.0) {
    // No bracket; fall back to the first standard form, which is still a
    // valid (sufficient) test.
    t = 0.0;
  } else {
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double g_mid = gap(mid);
      if (g_mid > 0.0) {
        lo = mid;
        g_lo = g_mid;
      } else {
        hi = mid;
        g_hi = g_mid;
      }
    }
    t = 0.5 * (lo + hi);
  }

  const double r1 = std::exp(t);
  const double r2 = (t == 0.0) ? 1.0 : r2_of(r1);
  const double n1 = big_n * r1;
  const double n2 = big_n / r1;
  const double m1 = big_m * r2;
  const double m2 = big_m / r2;
  const double c1 = k1 * std::sqrt(r1 * r2);
  const double c2 = k2 / std::sqrt(r1 * r2);
  const double a2 = std::sqrt((m1 - 1.0) / (n1 - 1.0));

  DuanForm2 out;
  out.variance = 0.5 * (a2 * (n1 + n2) + (m1 + m2) / a2) - c1 - c2;
  out.bound = a2 + 1.0 / a2;
  out.entangled = out.variance < out.bound;
  return out;
}

std::optional<StandardForm> try_standard_form(const CovarianceMatrix& cm) {
  try {
    return standard_form(cm);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

SymplecticInvariants invariants(const CovarianceMatrix& cm) {
  SymplecticInvariants inv;
  inv.i1 = cm.block_a().determinant();
  inv.i2 = cm.block_b().determinant();
  inv.i3 = cm.block_c().determinant();
  inv.i4 = cm.matrix().determinant();
  inv.delta = inv.i1 + inv.i2 + 2.0 * inv.i3;
  inv.delta_tilde = inv.i1 + inv.i2 - 2.0 * inv.i3;
  return inv;
}

SymplecticSpectrum symplectic_spectrum(const CovarianceMatrix& cm) {
  const auto inv = invariants(cm);
  SymplecticSpectrum s;
  std::tie(s.d_minus, s.d_plus) = eigen_pair(inv.delta, inv.i4, "symplectic eigenvalue");
  std::tie(s.dt_minus, s.dt_plus) =
      eigen_pair(inv.delta_tilde, inv.i4, "partially transposed symplectic eigenvalue");
  return s;
}

bool is_physical(const CovarianceMatrix& cm, double tol) {
  try {
    return symplectic_spectrum(cm).d_minus >= 0.5 - tol;
  } catch (const Error& e) {
    if (e.code() == Errc::NegativeRadicand) return false;
    throw;
  }
}

StandardForm standard_form(const CovarianceMatrix& cm) {
  const auto inv = invariants(cm);
  StandardForm sf;
  sf.n = std::sqrt(inv.i1);
  sf.m = std::sqrt(inv.i2);
  const double nm = sf.n * sf.m;

  // c1^2 + c2^2 and c1^2 c2^2 from I3 = c1 c2 and I4 = (nm - c1^2)(nm - c2^2).
  const double sum = (inv.i1 * inv.i2 + inv.i3 * inv.i3 - inv.i4) / nm;
  const double prod = inv.i3 * inv.i3;
  const double disc = sum * sum - 4.0 * prod;
  const double scale = std::max(sum * sum, 1.0);
  if (disc < -kRoundingSlack * scale || sum < -kRoundingSlack * scale) {
    throw Error(Errc::NoRealSolution,
                fmt::format("invariants admit no real (c1, c2): discriminant {:.6g}", disc));
  }
  const double root = std::sqrt(std::max(0.0, disc));
  const double c1_sq = std::max(0.0, 0.5 * (sum + root));
  const double c2_sq = 0.5 * (sum - root);
  if (c2_sq < -kRoundingSlack * scale) {
    throw Error(Errc::NoRealSolution, fmt::format("c2^2 = {:.6g} is negative", c2_sq));
  }
  sf.c1 = std::sqrt(c1_sq);
  sf.c2 = std::sqrt(std::max(0.0, c2_sq));
  if (inv.i3 < 0.0) sf.c2 = -sf.c2;
  return sf;
}

double purity(const CovarianceMatrix& cm) {
  return 1.0 / std::sqrt(16.0 * invariants(cm).i4);
}

double entropy_f(double x) {
  // Pure states have d+ = d-, a double root that the closed form only
  // resolves to ~sqrt(eps), so they can land slightly under 1/2.
  constexpr double kSlack = 1e-7;
  if (!(x >= 0.5 - kSlack)) {
    throw Error(Errc::DomainError, fmt::format("entropy_f needs x >= 1/2, got {:.17g}", x));
  }
  const double hi = x + 0.5;
  const double lo = x - 0.5;
  const double lo_term = lo > 0.0 ? lo * std::log(lo) : 0.0;
  return hi * std::log(hi) - lo_term;
}

double von_neumann_entropy(const CovarianceMatrix& cm) {
  const auto s = symplectic_spectrum(cm);
  return entropy_f(s.d_plus) + entropy_f(s.d_minus);
}

std::pair<double, double> conditional_entropies(const CovarianceMatrix& cm) {
  const auto inv = invariants(cm);
  const double total = von_neumann_entropy(cm);
  return {total - entropy_f(std::sqrt(inv.i2)), total - entropy_f(std::sqrt(inv.i1))};
}

double mutual_information(const CovarianceMatrix& cm) {
  const auto inv = invariants(cm);
  return entropy_f(std::sqrt(inv.i1)) + entropy_f(std::sqrt(inv.i2)) - von_neumann_entropy(cm);
}

double single_mode_entropy_from_purity(double mu) {
  if (!(mu > 0.0 && mu <= 1.0)) {
    throw Error(Errc::DomainError, fmt::format("purity must lie in (0, 1], got {:.17g}", mu));
  }
  if (mu == 1.0) return 0.0;
  // log((1+mu)/(1-mu)) written with log1p to stay accurate for small mu.
  const double log_ratio = std::log1p(mu) - std::log1p(-mu);
  return (1.0 - mu) / (2.0 * mu) * log_ratio - std::log(2.0 * mu / (1.0 + mu));
}

DuanResult duan(const CovarianceMatrix& cm) {
  const auto sf = standard_form(cm);
  if (sf.n <= 1.0 || sf.m <= 1.0) {
    throw Error(Errc::DuanUndefined,
                fmt::format("a^2 = sqrt((n-1)/(m-1)) needs n, m > 1 (n = {:.6g}, m = {:.6g})",
                            sf.n, sf.m));
  }
  DuanResult r;
  const double a2 = std::sqrt((sf.n - 1.0) / (sf.m - 1.0));
  r.beta = sf.n * a2 + sf.m / a2 - std::abs(sf.c1) - std::abs(sf.c2);
  r.threshold = a2 + 1.0 / a2;
  const auto form2 = duan_second_form(sf);
  r.form2_variance = form2.variance;
  r.form2_bound = form2.bound;
  r.entangled = form2.entangled;
  return r;
}

PhsResult phs(const CovarianceMatrix& cm) {
  const auto s = symplectic_spectrum(cm);
  return {s.dt_minus, s.dt_minus < 0.5};
}

double log_negativity(const CovarianceMatrix& cm) {
  const double dt = symplectic_spectrum(cm).dt_minus;
  return std::max(0.0, -std::log2(2.0 * dt));
}

EprResult epr(const CovarianceMatrix& cm) {
  const auto& s = cm.matrix();
  EprResult r;
  r.vx_a_given_b = s(0, 0) - s(0, 2) * s(0, 2) / s(2, 2);
  r.vy_a_given_b = s(1, 1) - s(1, 3) * s(1, 3) / s(3, 3);
  r.vx_b_given_a = s(2, 2) - s(0, 2) * s(0, 2) / s(0, 0);
  r.vy_b_given_a = s(3, 3) - s(1, 3) * s(1, 3) / s(1, 1);
  const double prod =
      r.vx_a_given_b * r.vy_a_given_b * r.vx_b_given_a * r.vy_b_given_a;
  r.beta = std::sqrt(std::max(0.0, prod));
  if (const auto sf = try_standard_form(cm)) {
    const double nm = sf->n * sf->m;
    r.beta_standard_form = nm * (1.0 - sf->c1 * sf->c1 / nm) * (1.0 - sf->c2 * sf->c2 / nm);
  } else {
    r.beta_standard_form = std::numeric_limits<double>::quiet_NaN();
  }
  r.correlated = r.beta < 0.25;
  return r;
}

double total_photons(const CovarianceMatrix& cm) {
  return 0.5 * cm.matrix().trace() - 1.0;
}

StateDiagnostics diagnose(const CovarianceMatrix& cm, double tol) {
  StateDiagnostics d;
  d.invariants = invariants(cm);
  d.spectrum = symplectic_spectrum(cm);
  d.standard_form = try_standard_form(cm);
  d.is_physical = d.spectrum.d_minus >= 0.5 - tol;
  d.purity = purity(cm);
  d.n_total = total_photons(cm);

  d.phs_dt_minus = d.spectrum.dt_minus;
  d.is_entangled_phs = d.spectrum.dt_minus < 0.5;
  d.log_negativity = std::max(0.0, -std::log2(2.0 * d.spectrum.dt_minus));

  if (d.is_physical) {
    const double sa = entropy_f(std::max(0.5, std::sqrt(d.invariants.i1)));
    const double sb = entropy_f(std::max(0.5, std::sqrt(d.invariants.i2)));
    const double total = entropy_f(std::max(0.5, d.spectrum.d_plus)) +
                         entropy_f(std::max(0.5, d.spectrum.d_minus));
    d.entropy = total;
    d.cond_1_given_2 = total - sb;
    d.cond_2_given_1 = total - sa;
    d.mutual_info = sa + sb - total;
  }

  if (d.standard_form) {
    const auto form2 = duan_second_form(*d.standard_form);
    d.is_entangled_duan = form2.entangled;
    if (d.standard_form->n > 1.0 && d.standard_form->m > 1.0) {
      d.duan = duan(cm);
    }
  }

  d.epr = epr(cm);
  d.is_epr = d.epr->correlated;
  return d;
}

}  // namespace twomode
