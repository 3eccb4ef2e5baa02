#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phaseret/coherence.hpp"
#include "phaseret/io.hpp"
#include "phaseret/metrics.hpp"
#include "phaseret/models.hpp"
#include "phaseret/solvers.hpp"

namespace phaseret {

enum class Method {
  LinearPc,            // Eq.-10-style solve plus the coherent re-solve refinement
  LinearPcRaw,         // the plain linear solve, no refinement
  NonconvexAugmented,  // intensity solver on the linear-combination-augmented stack
  NonconvexIncoherent, // intensity solver on magnitudes only
  Coherent             // full-phase least squares reference
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct SolverConfig {
  NonconvexSettings nonconvex;
  int spectral_iterations = 40;
};

struct GaussSweepConfig {
  int n = 20;
  int m1 = 20;
  std::vector<int> m2_values;  // defaults to 1..30 (0.05 n .. 1.5 n)
  int trials = 500;
  double success_threshold_db = -90.0;
  std::vector<Method> methods = {Method::LinearPc, Method::NonconvexAugmented,
                                 Method::NonconvexIncoherent};
};

struct AntennaConfig {
  double frequency_hz = 2.6e9;
  double box_size_m = 0.022;
  int sites = 54;  // inversion sites; n = 2 * sites dipoles
  double sphere_radius_m = 1.5;
  int samples_per_set = 400;
  double snr_db = 60.0;
  int generation_density = 2;          // generation basis has density * sites sites
  double generation_jitter_rel = 0.003;  // position jitter relative to box size
  std::vector<Eigen::Vector2d> probe_offsets_m = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.8}};
  int trials = 10;  // independent master seeds
  std::vector<Method> methods = {Method::Coherent, Method::LinearPc, Method::LinearPcRaw,
                                 Method::NonconvexAugmented, Method::NonconvexIncoherent};
  double ff_phi_deg = 90.0;
  double ff_theta_step_deg = 1.0;
  bool write_ff_cuts = true;
};

struct ExperimentConfig {
  std::string kind;  // "gauss-sweep" or "antenna"
  std::uint64_t seed = 1;
  bool timing = false;  // real wall times in records break byte-determinism
  SolverConfig solver;
  GaussSweepConfig gauss;
  AntennaConfig antenna;
};

ExperimentConfig default_gauss_config();
ExperimentConfig default_antenna_config();

/// Parses and validates the JSON config document; `origin` labels errors.
ExperimentConfig parse_config(const std::string& text, const std::string& origin);
ExperimentConfig load_config(const std::filesystem::path& path);

struct TrialRecord {
  int point = 0;  // m2 for sweeps, samples_per_set for the antenna benchmark
  Method method = Method::LinearPc;
  int trial = 0;
  std::uint64_t seed = 0;
  double eps_c_db = 0.0;
  double eps_m_db = 0.0;
  int iterations = 0;
  double wall_time_ms = 0.0;
};

struct SummaryRow {
  int m2 = 0;
  int m = 0;
  int n = 0;
  int q = 0;
  Method method = Method::LinearPc;
  int trials = 0;
  int successes = 0;
  double rate = 0.0;
};

struct GaussSweepResult {
  std::vector<TrialRecord> records;
  std::vector<SummaryRow> summary;
};

struct FfCutTrace {
  std::vector<double> theta_deg;
  ComplexVector result;     // peak-normalized
  ComplexVector reference;  // peak-normalized
  std::vector<double> deviation_db;
};

struct AntennaSeedInfo {
  int trial = 0;
  std::uint64_t master_seed = 0;
  double condition_number = 0.0;
  int n = 0;
  int m = 0;
  int q = 0;
};

struct AntennaResult {
  std::vector<TrialRecord> records;
  std::vector<AntennaSeedInfo> scenario;
  std::map<Method, FfCutTrace> ff_cuts;  // first master seed only
};

GaussSweepResult run_gauss_sweep(const ExperimentConfig& config, int threads);
AntennaResult run_antenna_benchmark(const ExperimentConfig& config, int threads);

void write_gauss_outputs(const GaussSweepResult& result, const ExperimentConfig& config,
                         const std::filesystem::path& out_dir);
void write_antenna_outputs(const AntennaResult& result, const ExperimentConfig& config,
                           const std::filesystem::path& out_dir);

struct SolveFiles {
  std::filesystem::path operator_csv;
  std::filesystem::path magnitudes_csv;  // complex vector; intra-group phases used
  std::filesystem::path coherence_json;
  std::optional<std::filesystem::path> reference_csv;
  std::string method = "linear-pc";
  std::optional<std::filesystem::path> solution_out;
};

struct SolveOutcome {
  Method method = Method::LinearPc;
  ComplexVector z;
  SolveReport report;
  std::optional<DeviationReport> deviation;
};

/// File-driven solve entry point; writes the solution vector when requested.
SolveOutcome run_solve(const SolveFiles& files, const SolverConfig& solver = {});

/// PHASERET_THREADS override, else hardware concurrency (at least 1).
int env_thread_count();

}  // namespace phaseret
