// twomode: synth | analyze | diagnose | pnm
//
// Exit codes: 0 ok, 2 unphysical CM, 3 Gaussianity failure, 4 parse or
// configuration error. Output directory defaults to $TWOMODE_OUTPUT_DIR,
// else the working directory.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <fmt/format.h>

#include "twomode/error.hpp"
#include "twomode/pipeline.hpp"
#include "twomode/report.hpp"
#include "twomode/trace_io.hpp"

namespace fs = std::filesystem;
using namespace twomode;

namespace {

constexpr int kExitParse = static_cast<int>(ExitCode::ParseFailure);

fs::path default_output_dir() {
  if (const char* env = std::getenv("TWOMODE_OUTPUT_DIR"); env && *env) return env;
  return fs::current_path();
}

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, fmt::format("cannot open config {}", path));
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, fmt::format("{}: {}", path, e.what()));
  }
}

// Fill `target` from config[key] unless the flag was given on the command line.
template <class T>
void from_config(const Json& cfg, const char* key, const CLI::Option* flag, T& target) {
  if (flag->count() > 0 || !cfg.contains(key)) return;
  try {
    target = cfg.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, fmt::format("config key '{}': {}", key, e.what()));
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json provenance(Json config) {
  Json p;
  p["tool"] = "twomode";
  p["version"] = TWOMODE_VERSION;
  p["eigen"] = fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
  p["fmt"] = FMT_VERSION;
  p["config"] = std::move(config);
  p["timestamp"] = utc_timestamp();
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(Errc::InvalidArgument, fmt::format("cannot write {}", path.string()));
}

CovarianceMatrix read_cm(const std::string& literal, const std::string& file) {
  if (!literal.empty() && !file.empty()) {
    throw Error(Errc::ParseError, "give either --cm or --cm-file, not both");
  }
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw Error(Errc::ParseError, fmt::format("cannot open {}", file));
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_cm(text);
  }
  if (literal.empty()) throw Error(Errc::ParseError, "a CM is required (--cm or --cm-file)");
  return parse_cm(literal);
}

struct SynthOptions {
  OPOModelParams model;
  SynthesisConfig synth;
  std::string cm;
  std::string config;
  std::string out;
};

int run_synth(const SynthOptions& o, const CLI::App& cmd) {
  const Json cfg = load_config(o.config);
  OPOModelParams model = o.model;
  SynthesisConfig sc = o.synth;
  std::string cm_literal = o.cm;
  std::string out = o.out;
  if (cfg.contains("model")) {
    const Json& m = cfg["model"];
    from_config(m, "zeta", cmd.get_option("--zeta"), model.zeta);
    from_config(m, "xi1", cmd.get_option("--xi1"), model.xi1);
    from_config(m, "xi2", cmd.get_option("--xi2"), model.xi2);
    from_config(m, "beta", cmd.get_option("--beta"), model.beta);
    from_config(m, "beta_phase", cmd.get_option("--beta-phase"), model.beta_phase);
    from_config(m, "nbar1", cmd.get_option("--nbar1"), model.nbar1);
    from_config(m, "nbar2", cmd.get_option("--nbar2"), model.nbar2);
  }
  from_config(cfg, "cm", cmd.get_option("--cm"), cm_literal);
  from_config(cfg, "eta", cmd.get_option("--eta"), sc.eta);
  from_config(cfg, "electronic_noise_var", cmd.get_option("--electronic-noise"), sc.electronic_noise_var);
  from_config(cfg, "n_samples", cmd.get_option("--samples"), sc.n_samples);
  from_config(cfg, "phase_jitter", cmd.get_option("--phase-jitter"), sc.phase_jitter);
  from_config(cfg, "seed", cmd.get_option("--seed"), sc.seed);
  from_config(cfg, "output_dir", cmd.get_option("--out"), out);

  const bool have_model = cmd.get_option("--zeta")->count() + cmd.get_option("--nbar1")->count() +
                              cmd.get_option("--nbar2")->count() + cmd.get_option("--beta")->count() +
                              cmd.get_option("--xi1")->count() + cmd.get_option("--xi2")->count() >
                              0 ||
                          cfg.contains("model");
  if (have_model && !cm_literal.empty()) {
    throw Error(Errc::ParseError, "give either model parameters or --cm, not both");
  }
  const CovarianceMatrix cm = cm_literal.empty() ? cm_from_model(model) : parse_cm(cm_literal);
  const fs::path dir = out.empty() ? default_output_dir() : fs::path(out);
  write_trace_set(dir, synthesize(cm, sc));
  write_text(dir / "model_cm.txt", format_cm(cm) + "\n");
  std::cout << fmt::format("wrote traces for seed {} to {}\n", sc.seed, dir.string());
  return 0;
}

struct AnalyzeOptions {
  std::string traces_dir;
  std::string config;
  std::string out;
  double alpha = 0.05;
  std::size_t bins = 104;
  std::string gate = "bonferroni";
  double delta_theta = 0.020;
  double eta = 0.0;
  std::vector<int> pnm;
  std::uint64_t seed = 0;
};

int run_analyze(const AnalyzeOptions& o, const CLI::App& cmd) {
  const Json cfg = load_config(o.config);
  AnalyzeOptions a = o;
  from_config(cfg, "traces_dir", cmd.get_option("--traces-dir"), a.traces_dir);
  from_config(cfg, "output_dir", cmd.get_option("--out"), a.out);
  from_config(cfg, "alpha", cmd.get_option("--alpha"), a.alpha);
  from_config(cfg, "n_bins", cmd.get_option("--bins"), a.bins);
  from_config(cfg, "gate", cmd.get_option("--gate"), a.gate);
  from_config(cfg, "delta_theta", cmd.get_option("--delta-theta"), a.delta_theta);
  from_config(cfg, "eta", cmd.get_option("--eta"), a.eta);
  from_config(cfg, "pnm", cmd.get_option("--pnm"), a.pnm);
  from_config(cfg, "seed", cmd.get_option("--seed"), a.seed);
  if (a.traces_dir.empty()) throw Error(Errc::ParseError, "--traces-dir is required");
  if (a.gate != "strict" && a.gate != "bonferroni") {
    throw Error(Errc::ParseError, fmt::format("unknown gate rule '{}'", a.gate));
  }
  if (!a.pnm.empty() && a.pnm.size() != 2) throw Error(Errc::ParseError, "--pnm takes N M");

  AnalysisConfig ac;
  ac.binning.n_bins = a.bins;
  ac.alpha = a.alpha;
  ac.rule = a.gate == "strict" ? GaussianityRule::Strict : GaussianityRule::Bonferroni;
  ac.delta_theta = a.delta_theta;
  if (a.eta > 0.0) ac.eta = a.eta;
  if (a.pnm.size() == 2) ac.pnm_cutoffs = std::make_pair(a.pnm[0], a.pnm[1]);
  ac.seed = a.seed;

  Json echo;
  echo["traces_dir"] = a.traces_dir;
  echo["alpha"] = a.alpha;
  echo["n_bins"] = a.bins;
  echo["gate"] = a.gate;
  echo["delta_theta"] = a.delta_theta;
  echo["eta"] = a.eta > 0.0 ? Json(a.eta) : Json(nullptr);
  echo["pnm"] = a.pnm;
  echo["seed"] = a.seed;

  const fs::path dir = a.out.empty() ? default_output_dir() : fs::path(a.out);
  fs::create_directories(dir);

  AnalysisResult result;
  try {
    result = analyze(read_trace_set(a.traces_dir), ac);
  } catch (const Error& e) {
    if (e.code() != Errc::ParseError) throw;
    result.exit_code = ExitCode::ParseFailure;
    result.failed_stage = "parse";
    result.failure_message = e.what();
  }

  write_text(dir / "report.json", analysis_report(result, provenance(echo)).dump(2) + "\n");
  if (!result.gaussianity.empty()) {
    std::ofstream csv(dir / "gaussianity.csv");
    write_gaussianity_csv(csv, result.gaussianity);
  }
  if (result.photon_statistics) {
    std::ofstream joint(dir / "pnm_joint.csv");
    write_pmf_csv(joint, result.photon_statistics->joint);
    std::ofstream pa(dir / "pnm_a.csv");
    write_pmf_csv(pa, result.photon_statistics->mode_a);
    std::ofstream pb(dir / "pnm_b.csv");
    write_pmf_csv(pb, result.photon_statistics->mode_b);
  }
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  if (result.exit_code != ExitCode::Ok) {
    std::cerr << fmt::format("{} failed: {}\n", result.failed_stage, result.failure_message);
  }
  std::cout << fmt::format("report: {}\n", (dir / "report.json").string());
  return static_cast<int>(result.exit_code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-mode Gaussian state analysis: synthesize, test, reconstruct, diagnose"};
  app.require_subcommand(1);

  SynthOptions so;
  auto* synth = app.add_subcommand("synth", "write homodyne traces for a model state");
  synth->add_option("--config", so.config, "JSON config file; flags override it");
  synth->add_option("--zeta", so.model.zeta, "two-mode squeezing");
  synth->add_option("--xi1", so.model.xi1, "local squeezing of mode a");
  synth->add_option("--xi2", so.model.xi2, "local squeezing of mode b");
  synth->add_option("--beta", so.model.beta, "mode-mixing amplitude");
  synth->add_option("--beta-phase", so.model.beta_phase, "mode-mixing phase");
  synth->add_option("--nbar1", so.model.nbar1, "thermal photons, mode a");
  synth->add_option("--nbar2", so.model.nbar2, "thermal photons, mode b");
  synth->add_option("--cm", so.cm, "16 row-major CM entries instead of a model");
  synth->add_option("--eta", so.synth.eta, "detection efficiency");
  synth->add_option("--electronic-noise", so.synth.electronic_noise_var,
                    "electronic noise variance (shot noise = 1/2)");
  synth->add_option("--samples", so.synth.n_samples, "samples per trace");
  synth->add_option("--phase-jitter", so.synth.phase_jitter, "LO phase noise std (rad)");
  synth->add_option("--no-f", [&so](const CLI::results_t&) { so.synth.include_f = false; return true; },
                    "omit the f-mode trace")
      ->expected(0);
  synth->add_option("--seed", so.synth.seed, "master seed");
  synth->add_option("--out", so.out, "output directory");

  AnalyzeOptions ao;
  auto* an = app.add_subcommand("analyze", "test, reconstruct and diagnose a trace directory");
  an->add_option("--config", ao.config, "JSON config file; flags override it");
  an->add_option("--traces-dir", ao.traces_dir, "directory with a.tsv .. f.tsv and vac.tsv");
  an->add_option("--out", ao.out, "output directory");
  an->add_option("--alpha", ao.alpha, "Shapiro-Wilk significance level");
  an->add_option("--bins", ao.bins, "phase bins");
  an->add_option("--gate", ao.gate, "strict | bonferroni");
  an->add_option("--delta-theta", ao.delta_theta, "LO phase stability (rad)");
  an->add_option("--eta", ao.eta, "override the efficiency in the trace headers");
  an->add_option("--pnm", ao.pnm, "photon-number cutoffs N M")->expected(2);
  an->add_option("--seed", ao.seed, "seed for bin subsampling");

  std::string cm_literal;
  std::string cm_file;
  std::string out_file;
  double tol = kDefaultPhysicalityTol;
  auto* diag = app.add_subcommand("diagnose", "all state diagnostics for a CM");
  diag->add_option("--cm", cm_literal, "16 row-major entries");
  diag->add_option("--cm-file", cm_file, "file holding 16 row-major entries");
  diag->add_option("--tol", tol, "physicality tolerance");
  diag->add_option("--out", out_file, "write the JSON here instead of stdout");

  int n_max = 20;
  int m_max = 20;
  auto* pnm = app.add_subcommand("pnm", "joint and marginal photon-number distributions");
  pnm->add_option("--cm", cm_literal, "16 row-major entries");
  pnm->add_option("--cm-file", cm_file, "file holding 16 row-major entries");
  pnm->add_option("--n-max", n_max, "cutoff for mode a");
  pnm->add_option("--m-max", m_max, "cutoff for mode b");
  pnm->add_option("--out", out_file, "directory for pnm_joint.csv, pnm_a.csv, pnm_b.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*synth) return run_synth(so, *synth);
    if (*an) return run_analyze(ao, *an);
    if (*diag) {
      const auto cm = read_cm(cm_literal, cm_file);
      Json echo{{"tol", tol}};
      const std::string text = diagnose_report(cm, provenance(echo), tol).dump(2) + "\n";
      if (out_file.empty()) {
        std::cout << text;
      } else {
        write_text(out_file, text);
      }
      return 0;
    }
    if (*pnm) {
      const auto cm = read_cm(cm_literal, cm_file);
      const auto joint = joint_pnm(cm, n_max, m_max);
      const auto pa = single_pnm(cm.block_a(), n_max);
      const auto pb = single_pnm(cm.block_b(), m_max);
      if (out_file.empty()) {
        write_pmf_csv(std::cout, joint);
      } else {
        const fs::path dir = out_file;
        fs::create_directories(dir);
        std::ofstream j(dir / "pnm_joint.csv");
        write_pmf_csv(j, joint);
        std::ofstream a(dir / "pnm_a.csv");
        write_pmf_csv(a, pa);
        std::ofstream b(dir / "pnm_b.csv");
        write_pmf_csv(b, pb);
      }
      std::cerr << fmt::format("deficit {:.3g}, {} entries clipped\n", joint.deficit, joint.clipped);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case Errc::ParseError:
      case Errc::NotSymmetric:
      case Errc::NotPositiveDefinite:
      case Errc::InvalidArgument:
        return kExitParse;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
