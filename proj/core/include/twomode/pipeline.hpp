#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twomode/gaussian.hpp"
#include "twomode/gaussianity.hpp"
#include "twomode/photon_statistics.hpp"
#include "twomode/reconstruction.hpp"
#include "twomode/synthesis.hpp"

namespace twomode {

/// Traces for modes a..f (f optional) plus the shot-noise trace.
struct TraceSet {
  std::array<std::optional<HomodyneTrace>, 6> modes;
  std::optional<HomodyneTrace> vacuum;

  std::optional<HomodyneTrace>& operator[](Mode m) { return modes[static_cast<std::size_t>(m)]; }
  const std::optional<HomodyneTrace>& operator[](Mode m) const {
    return modes[static_cast<std::size_t>(m)];
  }
};

struct SynthesisConfig {
  double eta = kDefaultEfficiency;
  double electronic_noise_var = kDefaultElectronicNoise;
  std::size_t n_samples = 100000;
  double phase_jitter = kDefaultPhaseJitter;
  std::uint64_t seed = 0;
  bool include_f = true;
};

/// Stream k = 0..5 seeds modes a..f, stream 6 the shot-noise trace.
TraceSet synthesize(const CovarianceMatrix& cm, const SynthesisConfig& config);

/// Files are named a.tsv ... f.tsv and vac.tsv.
std::filesystem::path trace_path(const std::filesystem::path& dir, std::string_view label);
void write_trace_set(const std::filesystem::path& dir, const TraceSet& set);
/// Missing f.tsv or vac.tsv is allowed; other missing files throw ParseError.
TraceSet read_trace_set(const std::filesystem::path& dir);

/// Gate applied to the bins of all traces of one analysis.
enum class GaussianityRule {
  Strict,      ///< every bin p >= alpha
  Bonferroni,  ///< every bin p >= alpha / (total number of bins over all traces)
};

struct AnalysisConfig {
  PhaseBinning binning;
  double alpha = 0.05;
  GaussianityRule rule = GaussianityRule::Bonferroni;
  double delta_theta = 0.020;
  /// Overrides the per-trace efficiency from the file header.
  std::optional<double> eta;
  double physicality_tol = kDefaultPhysicalityTol;
  /// Joint and marginal photon statistics up to (n_max, m_max).
  std::optional<std::pair<int, int>> pnm_cutoffs;
  std::uint64_t seed = 0;
};

/// Single-mode CM of the shot-noise trace compared with diag(1/2, 1/2).
struct VacuumCheck {
  Matrix2 cm = Matrix2::Zero();
  Matrix2 errors = Matrix2::Zero();
  double max_deviation_sigma = 0.0;
  bool consistent = false;  ///< every element within 4 sigma
};

/// One-sigma errors of the scalar diagnostics, propagated from the CM
/// element errors. Empty where the scalar is undefined.
struct DiagnosticErrors {
  std::optional<double> dt_minus;
  std::optional<double> log_negativity;
  std::optional<double> beta_duan;
  std::optional<double> beta_epr;
  std::optional<double> entropy;
  std::optional<double> mutual_info;
  std::optional<double> n_total;
};

struct PhotonStatistics {
  JointPMF joint;
  SingleModePMF mode_a;
  SingleModePMF mode_b;
};

enum class ExitCode : int { Ok = 0, Unphysical = 2, GaussianityFailed = 3, ParseFailure = 4 };

struct AnalysisResult {
  ExitCode exit_code = ExitCode::Ok;
  /// Empty on success, else gaussianity | reconstruction | physicality | photon_statistics.
  std::string failed_stage;
  std::string failure_message;
  std::map<std::string, GaussianityReport> gaussianity;
  std::optional<VacuumCheck> vacuum_check;
  ModeEstimates estimates;
  std::optional<ReconstructedCM> reconstruction;
  std::optional<StateDiagnostics> diagnostics;
  DiagnosticErrors diagnostic_errors;
  std::optional<PhotonStatistics> photon_statistics;
  std::vector<std::string> warnings;
};

/// Gaussianity -> vacuum check (reported, not gating) -> tomography ->
/// reconstruction with phase-error inflation -> physicality gate ->
/// diagnostics -> optional photon statistics. Samples are rescaled by
/// sqrt(1/2 / shotnoise_var) before any statistic is taken.
AnalysisResult analyze(const TraceSet& traces, const AnalysisConfig& config);

/// The trace in shot-noise units (vacuum variance 1/2).
HomodyneTrace normalized(const HomodyneTrace& trace);

DiagnosticErrors propagate_diagnostic_errors(const ReconstructedCM& rcm);

}  // namespace twomode
