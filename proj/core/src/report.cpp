#include "twomode/report.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>

#include "twomode/trace_io.hpp"

namespace twomode {
namespace {

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json row_major_json(const Matrix4& m) {
  Json out = Json::array();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out.push_back(m(i, j));
  }
  return out;
}

Json estimate_json(const TomographicEstimate& e) {
  Json j;
  j["mean"] = e.mean;
  j["confidence"] = e.confidence;
  j["n_used"] = e.n_used;
  j["phase_uniform"] = e.phase_uniform;
  return j;
}

Json moments_json(const QuadratureMoments& q) {
  Json j;
  j["mean"] = estimate_json(q.mean);
  j["second_moment"] = estimate_json(q.second);
  j["variance"] = q.variance();
  return j;
}

Json tomography_json(const ModeEstimates& est) {
  Json out = Json::object();
  for (Mode m : kAllModes) {
    const auto& e = est[m];
    if (!e) continue;
    Json j;
    j["x"] = moments_json(e->x);
    j["y"] = moments_json(e->y);
    if (e->z) j["z"] = moments_json(*e->z);
    if (e->t) j["t"] = moments_json(*e->t);
    out[std::string(to_string(m))] = std::move(j);
  }
  return out;
}

Json errors_json(const DiagnosticErrors& e) {
  Json j;
  j["dt_minus"] = optional_json(e.dt_minus);
  j["log_negativity"] = optional_json(e.log_negativity);
  j["beta_duan"] = optional_json(e.beta_duan);
  j["beta_epr"] = optional_json(e.beta_epr);
  j["entropy"] = optional_json(e.entropy);
  j["mutual_info"] = optional_json(e.mutual_info);
  j["n_total"] = optional_json(e.n_total);
  return j;
}

Json vacuum_json(const VacuumCheck& v) {
  Json j;
  j["cm"] = matrix_json(v.cm);
  j["errors"] = matrix_json(v.errors);
  j["max_deviation_sigma"] = v.max_deviation_sigma;
  j["consistent"] = v.consistent;
  return j;
}

}  // namespace

Json to_json(const CovarianceMatrix& cm) {
  Json j;
  j["entries"] = row_major_json(cm.matrix());
  return j;
}

Json to_json(const StateDiagnostics& d) {
  Json j;
  j["invariants"] = {{"i1", d.invariants.i1},       {"i2", d.invariants.i2},
                     {"i3", d.invariants.i3},       {"i4", d.invariants.i4},
                     {"delta", d.invariants.delta}, {"delta_tilde", d.invariants.delta_tilde}};
  j["spectrum"] = {{"d_minus", d.spectrum.d_minus},
                   {"d_plus", d.spectrum.d_plus},
                   {"dt_minus", d.spectrum.dt_minus},
                   {"dt_plus", d.spectrum.dt_plus}};
  if (d.standard_form) {
    j["standard_form"] = {{"n", d.standard_form->n},
                          {"m", d.standard_form->m},
                          {"c1", d.standard_form->c1},
                          {"c2", d.standard_form->c2}};
  } else {
    j["standard_form"] = nullptr;
  }
  j["is_physical"] = d.is_physical;
  j["purity"] = d.purity;
  j["entropy"] = optional_json(d.entropy);
  j["cond_1_given_2"] = optional_json(d.cond_1_given_2);
  j["cond_2_given_1"] = optional_json(d.cond_2_given_1);
  j["mutual_info"] = optional_json(d.mutual_info);
  if (d.duan) {
    j["duan"] = {{"beta", d.duan->beta},
                 {"threshold", d.duan->threshold},
                 {"form2_variance", d.duan->form2_variance},
                 {"form2_bound", d.duan->form2_bound},
                 {"entangled", d.duan->entangled}};
  } else {
    j["duan"] = nullptr;
  }
  j["phs_dt_minus"] = d.phs_dt_minus;
  j["log_negativity"] = d.log_negativity;
  if (d.epr) {
    j["epr"] = {{"beta", d.epr->beta},
                {"vx_a_given_b", d.epr->vx_a_given_b},
                {"vy_a_given_b", d.epr->vy_a_given_b},
                {"vx_b_given_a", d.epr->vx_b_given_a},
                {"vy_b_given_a", d.epr->vy_b_given_a},
                {"beta_standard_form", d.epr->beta_standard_form},
                {"correlated", d.epr->correlated}};
  } else {
    j["epr"] = nullptr;
  }
  j["n_total"] = d.n_total;
  j["is_entangled_duan"] = d.is_entangled_duan;
  j["is_entangled_phs"] = d.is_entangled_phs;
  j["is_epr"] = d.is_epr;
  return j;
}

Json to_json(const GaussianityReport& g, bool include_bins) {
  Json j;
  j["n_bins"] = g.binning.n_bins;
  j["sweep_start"] = g.binning.start;
  j["sweep_end"] = g.binning.end;
  j["alpha"] = g.alpha;
  j["pass"] = g.pass;
  j["pass_bonferroni"] = g.pass_bonferroni;
  j["n_rejected"] = g.n_rejected;
  j["min_p"] = g.min_p;
  j["max_abs_gamma"] = g.max_abs_gamma;
  if (include_bins) {
    Json bins = Json::array();
    for (const auto& b : g.bins) {
      bins.push_back({{"bin", b.bin},
                      {"theta_center", b.theta_center},
                      {"n", b.n},
                      {"gamma", b.gamma},
                      {"w", b.w},
                      {"p", b.p}});
    }
    j["bins"] = std::move(bins);
  }
  return j;
}

Json to_json(const JointPMF& p) {
  Json j;
  j["probs"] = matrix_json(p.probs);
  j["deficit"] = p.deficit;
  j["clipped"] = p.clipped;
  j["nodes_per_axis"] = p.nodes_per_axis;
  return j;
}

Json to_json(const SingleModePMF& p) {
  Json j;
  j["probs"] = Json(std::vector<double>(p.probs.data(), p.probs.data() + p.probs.size()));
  j["deficit"] = p.deficit;
  j["clipped"] = p.clipped;
  j["nodes_per_axis"] = p.nodes_per_axis;
  return j;
}

Json analysis_report(const AnalysisResult& r, Json provenance) {
  Json j;
  j["report_version"] = kReportVersion;
  j["command"] = "analyze";
  j["exit_code"] = static_cast<int>(r.exit_code);
  j["failed_stage"] = r.failed_stage.empty() ? Json(nullptr) : Json(r.failed_stage);
  j["failure_message"] = r.failure_message.empty() ? Json(nullptr) : Json(r.failure_message);

  if (r.gaussianity.empty()) {
    j["gaussianity"] = nullptr;
  } else {
    Json g = Json::object();
    for (Mode m : kAllModes) {
      const auto it = r.gaussianity.find(std::string(to_string(m)));
      if (it != r.gaussianity.end()) g[it->first] = to_json(it->second, false);
    }
    j["gaussianity"] = std::move(g);
  }
  j["vacuum_check"] = r.vacuum_check ? vacuum_json(*r.vacuum_check) : Json(nullptr);
  const bool have_estimates =
      std::any_of(r.estimates.modes.begin(), r.estimates.modes.end(), [](const auto& e) { return e.has_value(); });
  j["tomography"] = have_estimates ? tomography_json(r.estimates) : Json(nullptr);

  if (r.reconstruction) {
    const auto& rc = *r.reconstruction;
    Json c;
    c["entries"] = row_major_json(rc.sigma);
    c["errors"] = row_major_json(rc.errors);
    c["used_f_substitution"] = rc.used_f_substitution;
    c["physical"] = rc.physical;
    c["d_minus"] = rc.d_minus;
    j["covariance"] = std::move(c);
  } else {
    j["covariance"] = nullptr;
  }
  j["diagnostics"] = r.diagnostics ? to_json(*r.diagnostics) : Json(nullptr);
  j["diagnostic_errors"] = r.diagnostics ? errors_json(r.diagnostic_errors) : Json(nullptr);
  if (r.photon_statistics) {
    j["photon_statistics"] = {{"joint", to_json(r.photon_statistics->joint)},
                              {"mode_a", to_json(r.photon_statistics->mode_a)},
                              {"mode_b", to_json(r.photon_statistics->mode_b)}};
  } else {
    j["photon_statistics"] = nullptr;
  }
  j["warnings"] = r.warnings;
  j["provenance"] = std::move(provenance);
  return j;
}

Json diagnose_report(const CovarianceMatrix& cm, Json provenance, double tol) {
  Json j;
  j["report_version"] = kReportVersion;
  j["command"] = "diagnose";
  j["covariance"] = to_json(cm);
  j["diagnostics"] = to_json(diagnose(cm, tol));
  j["provenance"] = std::move(provenance);
  return j;
}

void write_gaussianity_csv(std::ostream& out, const std::map<std::string, GaussianityReport>& g) {
  out << "mode,bin,theta_center,n,gamma,w,p\n";
  for (Mode m : kAllModes) {
    const auto it = g.find(std::string(to_string(m)));
    if (it == g.end()) continue;
    for (const auto& b : it->second.bins) {
      out << fmt::format("{},{},{},{},{},{},{}\n", it->first, b.bin, format_double(b.theta_center),
                         b.n, format_double(b.gamma), format_double(b.w), format_double(b.p));
    }
  }
}

void write_pmf_csv(std::ostream& out, const JointPMF& p) {
  out << "n,m,p\n";
  for (Eigen::Index n = 0; n < p.probs.rows(); ++n) {
    for (Eigen::Index m = 0; m < p.probs.cols(); ++m) {
      out << fmt::format("{},{},{}\n", n, m, format_double(p.probs(n, m)));
    }
  }
}

void write_pmf_csv(std::ostream& out, const SingleModePMF& p) {
  out << "n,p\n";
  for (Eigen::Index n = 0; n < p.probs.size(); ++n) {
    out << fmt::format("{},{}\n", n, format_double(p.probs(n)));
  }
}

}  // namespace twomode
