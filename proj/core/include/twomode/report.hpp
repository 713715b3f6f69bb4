#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include <json.hpp>

#include "twomode/gaussian.hpp"
#include "twomode/gaussianity.hpp"
#include "twomode/pipeline.hpp"

namespace twomode {

using Json = nlohmann::ordered_json;

inline constexpr int kReportVersion = 1;

/// Field order of every object is fixed by these functions; doubles are
/// written as the shortest decimal that reads back to the same value and
/// NaN/inf become null.
Json to_json(const CovarianceMatrix& cm);
Json to_json(const StateDiagnostics& d);
Json to_json(const GaussianityReport& g, bool include_bins = true);
Json to_json(const JointPMF& p);
Json to_json(const SingleModePMF& p);

/// Top-level document:
///   report_version, command, exit_code, failed_stage, failure_message,
///   gaussianity, vacuum_check, tomography, covariance, diagnostics,
///   diagnostic_errors, photon_statistics, warnings, provenance.
/// Sections that were not reached are null.
Json analysis_report(const AnalysisResult& result, Json provenance);

/// Report for a literal CM: report_version, command, covariance, diagnostics, provenance.
Json diagnose_report(const CovarianceMatrix& cm, Json provenance,
                     double tol = kDefaultPhysicalityTol);

/// "mode,bin,theta_center,n,gamma,w,p" rows.
void write_gaussianity_csv(std::ostream& out, const std::map<std::string, GaussianityReport>& g);
/// "n,m,p" rows.
void write_pmf_csv(std::ostream& out, const JointPMF& p);
/// "n,p" rows.
void write_pmf_csv(std::ostream& out, const SingleModePMF& p);

}  // namespace twomode
