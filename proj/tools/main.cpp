#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "phaseret/harness.hpp"
#include "phaseret/metrics.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int run_experiment(const std::string& kind, const std::string& config_path,
                   const std::string& out_dir) {
  phaseret::ExperimentConfig cfg =
      config_path.empty()
          ? (kind == "antenna" ? phaseret::default_antenna_config()
                               : phaseret::default_gauss_config())
          : phaseret::load_config(config_path);
  if (cfg.kind != kind) {
    throw phaseret::ConfigError("config describes a '" + cfg.kind + "' experiment, but the '" +
                                kind + "' subcommand was invoked");
  }
  const int threads = phaseret::env_thread_count();
  if (kind == "gauss-sweep") {
    const auto result = phaseret::run_gauss_sweep(cfg, threads);
    phaseret::write_gauss_outputs(result, cfg, out_dir);
    std::cout << "wrote " << result.records.size() << " records to " << out_dir << "\n";
    for (const auto& s : result.summary) {
      std::printf("m2=%3d  %-22s %4d/%d  rate=%.4f\n", s.m2,
                  phaseret::method_name(s.method).c_str(), s.successes, s.trials, s.rate);
    }
  } else {
    const auto result = phaseret::run_antenna_benchmark(cfg, threads);
    phaseret::write_antenna_outputs(result, cfg, out_dir);
    std::cout << "wrote " << result.records.size() << " records to " << out_dir << "\n";
    for (const auto& r : result.records) {
      std::printf("trial=%2d  %-22s eps_c=%9.4f dB  eps_m=%9.4f dB\n", r.trial,
                  phaseret::method_name(r.method).c_str(), phaseret::db_floor(r.eps_c_db),
                  phaseret::db_floor(r.eps_m_db));
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear and nonconvex phase retrieval for partially coherent measurements"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";

  auto* gauss = app.add_subcommand("gauss-sweep",
                                   "Success-rate sweep over complex-Gaussian ensembles");
  gauss->add_option("--config", config_path, "JSON experiment config (defaults when omitted)");
  gauss->add_option("--out", out_dir, "output directory")->required();

  auto* antenna = app.add_subcommand("antenna", "Synthetic dipole-antenna benchmark");
  antenna->add_option("--config", config_path, "JSON experiment config (defaults when omitted)");
  antenna->add_option("--out", out_dir, "output directory")->required();

  phaseret::SolveFiles files;
  std::string reference_path;
  std::string solution_path = "solution.csv";
  auto* solve = app.add_subcommand("solve", "Solve one instance from data files");
  solve->add_option("--operator", files.operator_csv, "operator CSV (row,col,re,im)")
      ->required();
  solve
      ->add_option("--magnitudes", files.magnitudes_csv,
                   "measurement CSV (index,re,im); magnitudes and intra-group phases are used")
      ->required();
  solve->add_option("--coherence", files.coherence_json, "coherence JSON {\"groups\": [[..]]}")
      ->required();
  solve->add_option("--reference", reference_path, "reference CSV for deviation reporting");
  solve
      ->add_option("--method", files.method,
                   "linear-pc | linear-pc-raw | nonconvex-augmented | nonconvex-incoherent | "
                   "coherent")
      ->capture_default_str();
  solve->add_option("--solution", solution_path, "output CSV for the recovered coefficients")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gauss->parsed()) {
      return run_experiment("gauss-sweep", config_path, out_dir);
    }
    if (antenna->parsed()) {
      return run_experiment("antenna", config_path, out_dir);
    }
    if (!reference_path.empty()) {
      files.reference_csv = reference_path;
    }
    files.solution_out = solution_path;
    const auto outcome = phaseret::run_solve(files);
    std::cout << "method " << phaseret::method_name(outcome.method) << ": wrote "
              << outcome.z.size() << " coefficients to " << solution_path << "\n";
    if (!outcome.report.converged) {
      std::cout << "note: solver stopped before convergence (best iterate returned)\n";
    }
    if (outcome.report.condition_warning) {
      std::cout << "note: system was under-determined or rank-deficient\n";
    }
    if (outcome.deviation) {
      std::printf("eps_c = %.4f dB, eps_m = %.4f dB\n",
                  phaseret::db_floor(outcome.deviation->epsilon_c_db),
                  phaseret::db_floor(outcome.deviation->epsilon_m_db));
    }
    return kExitOk;
  } catch (const phaseret::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const phaseret::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
