#include "twomode/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <fmt/format.h>

#include "twomode/error.hpp"
#include "twomode/trace_io.hpp"

namespace twomode {
namespace {

constexpr std::uint64_t kVacuumStream = 6;

template <class F>
std::optional<double> maybe_error(const ReconstructedCM& rcm, F&& f) {
  try {
    f(rcm.cm());  // undefined at the estimate itself -> no error either
  } catch (const Error&) {
    return std::nullopt;
  }
  const double e = propagated_error(rcm.sigma, rcm.errors, f);
  if (std::isnan(e)) return std::nullopt;
  return e;
}

VacuumCheck check_vacuum(const HomodyneTrace& vac) {
  ModeEstimates est;
  est[Mode::a] = estimate_mode(vac, 1.0, vac.config.electronic_noise_var, true);
  const auto block = reconstruct_diag_block(est, Mode::a);
  VacuumCheck out;
  out.cm = block.value;
  out.errors = block.error;
  const Matrix2 dev = block.value - kVacuumVariance * Matrix2::Identity();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double s = block.error(i, j) > 0.0 ? std::abs(dev(i, j)) / block.error(i, j)
                                               : (dev(i, j) == 0.0 ? 0.0 : INFINITY);
      out.max_deviation_sigma = std::max(out.max_deviation_sigma, s);
    }
  }
  out.consistent = out.max_deviation_sigma <= 4.0;
  return out;
}

}  // namespace

TraceSet synthesize(const CovarianceMatrix& cm, const SynthesisConfig& config) {
  MeasurementConfig mc;
  mc.eta = config.eta;
  mc.electronic_noise_var = config.electronic_noise_var;
  mc.n_samples = config.n_samples;
  mc.phase_jitter = config.phase_jitter;

  TraceSet set;
  for (std::size_t k = 0; k < 6; ++k) {
    const Mode mode = kAllModes[k];
    if (mode == Mode::f && !config.include_f) continue;
    mc.mode = mode;
    mc.seed = derive_seed(config.seed, k);
    set[mode] = sample_trace(cm, mc);
  }
  mc.seed = derive_seed(config.seed, kVacuumStream);
  set.vacuum = shot_noise_trace(mc);
  return set;
}

std::filesystem::path trace_path(const std::filesystem::path& dir, std::string_view label) {
  return dir / fmt::format("{}.tsv", label);
}

void write_trace_set(const std::filesystem::path& dir, const TraceSet& set) {
  std::filesystem::create_directories(dir);
  for (Mode m : kAllModes) {
    if (set[m]) write_trace_file(trace_path(dir, to_string(m)), *set[m]);
  }
  if (set.vacuum) write_trace_file(trace_path(dir, "vac"), *set.vacuum);
}

TraceSet read_trace_set(const std::filesystem::path& dir) {
  TraceSet set;
  for (Mode m : kAllModes) {
    const auto path = trace_path(dir, to_string(m));
    if (!std::filesystem::exists(path)) {
      if (m == Mode::f) continue;
      throw Error(Errc::ParseError, fmt::format("missing trace file {}", path.string()));
    }
    auto trace = read_trace_file(path);
    if (trace.label == "vac" || trace.config.mode != m) {
      throw Error(Errc::ParseError,
                  fmt::format("{} declares mode={}", path.string(), trace.label));
    }
    set[m] = std::move(trace);
  }
  const auto vac = trace_path(dir, "vac");
  if (std::filesystem::exists(vac)) set.vacuum = read_trace_file(vac);
  return set;
}

HomodyneTrace normalized(const HomodyneTrace& trace) {
  HomodyneTrace out = trace;
  const double scale = std::sqrt(kVacuumVariance / trace.shotnoise_var);
  for (auto& s : out.samples) s.x *= scale;
  out.config.electronic_noise_var *= scale * scale;
  out.shotnoise_var = kVacuumVariance;
  return out;
}

DiagnosticErrors propagate_diagnostic_errors(const ReconstructedCM& rcm) {
  DiagnosticErrors e;
  e.dt_minus = maybe_error(rcm, [](const CovarianceMatrix& c) { return symplectic_spectrum(c).dt_minus; });
  e.log_negativity = maybe_error(rcm, [](const CovarianceMatrix& c) { return log_negativity(c); });
  e.beta_duan = maybe_error(rcm, [](const CovarianceMatrix& c) { return duan(c).beta; });
  e.beta_epr = maybe_error(rcm, [](const CovarianceMatrix& c) { return epr(c).beta; });
  e.entropy = maybe_error(rcm, [](const CovarianceMatrix& c) { return von_neumann_entropy(c); });
  e.mutual_info = maybe_error(rcm, [](const CovarianceMatrix& c) { return mutual_information(c); });
  e.n_total = maybe_error(rcm, [](const CovarianceMatrix& c) { return total_photons(c); });
  return e;
}

AnalysisResult analyze(const TraceSet& raw, const AnalysisConfig& config) {
  AnalysisResult r;
  auto fail = [&r](ExitCode code, std::string stage, std::string message) {
    r.exit_code = code;
    r.failed_stage = std::move(stage);
    r.failure_message = std::move(message);
    return r;
  };

  TraceSet traces;
  for (Mode m : kAllModes) {
    if (raw[m]) traces[m] = normalized(*raw[m]);
  }
  if (raw.vacuum) traces.vacuum = normalized(*raw.vacuum);

  // Gaussianity gate. The Bonferroni rule treats every bin of every trace
  // as one family, so the whole analysis has false-alarm rate alpha.
  std::size_t total_bins = 0;
  for (std::size_t k = 0; k < 6; ++k) {
    const auto& t = traces.modes[k];
    if (!t) continue;
    try {
      auto rep = gaussianity_report(*t, config.binning, config.alpha, derive_seed(config.seed, k));
      total_bins += rep.bins.size();
      r.gaussianity.emplace(std::string(to_string(kAllModes[k])), std::move(rep));
    } catch (const Error& e) {
      return fail(ExitCode::GaussianityFailed, "gaussianity", e.what());
    }
  }
  const double threshold = config.rule == GaussianityRule::Strict
                               ? config.alpha
                               : config.alpha / static_cast<double>(std::max<std::size_t>(total_bins, 1));
  std::size_t rejected = 0;
  for (const auto& [label, rep] : r.gaussianity) {
    for (const auto& b : rep.bins) rejected += b.p < threshold ? 1 : 0;
  }
  if (rejected > 0) {
    return fail(ExitCode::GaussianityFailed, "gaussianity",
                fmt::format("{} of {} phase bins have p < {:.3g}", rejected, total_bins, threshold));
  }

  if (traces.vacuum) {
    try {
      r.vacuum_check = check_vacuum(*traces.vacuum);
      if (!r.vacuum_check->consistent) {
        r.warnings.push_back(fmt::format("shot-noise trace deviates from the vacuum CM by {:.2f} sigma",
                                         r.vacuum_check->max_deviation_sigma));
      }
    } catch (const Error& e) {
      r.warnings.push_back(fmt::format("vacuum check skipped: {}", e.what()));
    }
  }

  try {
    for (Mode m : kAllModes) {
      const auto& t = traces[m];
      if (!t) continue;
      const double eta = config.eta.value_or(t->config.eta);
      r.estimates[m] = estimate_mode(*t, eta, t->config.electronic_noise_var,
                                     m == Mode::a || m == Mode::b);
    }
    auto rcm = reconstruct(r.estimates, config.physicality_tol);
    phase_error_inflation(rcm, config.delta_theta);
    r.warnings.insert(r.warnings.end(), rcm.warnings.begin(), rcm.warnings.end());
    r.reconstruction = std::move(rcm);
  } catch (const Error& e) {
    return fail(ExitCode::ParseFailure, "reconstruction", e.what());
  }

  const auto& rcm = *r.reconstruction;
  if (!rcm.physical) {
    return fail(ExitCode::Unphysical, "physicality",
                std::isnan(rcm.d_minus)
                    ? std::string("reconstructed matrix is not positive definite")
                    : fmt::format("d_minus = {:.6g} < 1/2", rcm.d_minus));
  }

  const auto cm = rcm.cm();
  r.diagnostics = diagnose(cm, config.physicality_tol);
  r.diagnostic_errors = propagate_diagnostic_errors(rcm);

  if (config.pnm_cutoffs) {
    try {
      const auto [n_max, m_max] = *config.pnm_cutoffs;
      r.photon_statistics = PhotonStatistics{joint_pnm(cm, n_max, m_max),
                                             single_pnm(cm.block_a(), n_max),
                                             single_pnm(cm.block_b(), m_max)};
    } catch (const Error& e) {
      r.warnings.push_back(fmt::format("photon statistics skipped: {}", e.what()));
    }
  }
  return r;
}

}  // namespace twomode
