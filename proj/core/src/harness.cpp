#include "phaseret/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "phaseret/random.hpp"

namespace phaseret {

namespace {

using nlohmann::json;

// seed-derivation streams (documented in the README)
constexpr std::uint64_t kStreamGaussTrial = 11;
constexpr std::uint64_t kStreamAntennaMaster = 101;
constexpr std::uint64_t kStreamAutJitter = 1;
constexpr std::uint64_t kStreamAutCoefficients = 2;
constexpr std::uint64_t kStreamPlanSingle = 3;
constexpr std::uint64_t kStreamPlanPair = 4;
constexpr std::uint64_t kStreamNoise = 5;

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled) {
    if (enabled_) {
      start_ = std::chrono::steady_clock::now();
    }
  }
  double elapsed_ms() const {
    if (!enabled_) {
      return 0.0;
    }
    const auto d = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double, std::milli>(d).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

void parallel_for(int task_count, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, task_count));
  if (threads == 1) {
    for (int i = 0; i < task_count; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const int i = next.fetch_add(1);
      if (i >= task_count) {
        return;
      }
      try {
        body(i);
      } catch (const std::exception& e) {
        std::scoped_lock lock(error_mutex);
        if (!failed.exchange(true)) {
          first_error = e.what();
        }
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  for (auto& th : pool) {
    th.join();
  }
  if (failed.load()) {
    throw NumericalError("worker failed: " + first_error);
  }
}

ComplexVector draw_cn_vector(Eigen::Index size, std::uint64_t seed) {
  auto rng = make_engine(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  ComplexVector v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const double re = dist(rng);
    const double im = dist(rng);
    v[i] = Complex(re, im) / std::sqrt(2.0);
  }
  return v;
}

CoherenceStructure sets_structure(int m1, int m2) {
  std::vector<std::vector<int>> groups;
  groups.reserve(static_cast<std::size_t>(m1 + m2));
  for (int i = 0; i < m1; ++i) {
    groups.push_back({i});
  }
  for (int k = 0; k < m2; ++k) {
    groups.push_back({m1 + k, m1 + m2 + k});
  }
  return CoherenceStructure::from_groups(std::move(groups));
}

std::string fmt_db(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", db_floor(v));
  return buf;
}

std::string fmt_fixed(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) {
    throw ConfigError(p.string() + ": cannot open for writing");
  }
  return out;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::LinearPc: return "linear-pc";
    case Method::LinearPcRaw: return "linear-pc-raw";
    case Method::NonconvexAugmented: return "nonconvex-augmented";
    case Method::NonconvexIncoherent: return "nonconvex-incoherent";
    case Method::Coherent: return "coherent";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "linear-pc") return Method::LinearPc;
  if (name == "linear-pc-raw") return Method::LinearPcRaw;
  if (name == "nonconvex-augmented") return Method::NonconvexAugmented;
  if (name == "nonconvex-incoherent") return Method::NonconvexIncoherent;
  if (name == "coherent") return Method::Coherent;
  throw ConfigError("unknown method '" + name + "'");
}

ExperimentConfig default_gauss_config() {
  ExperimentConfig cfg;
  cfg.kind = "gauss-sweep";
  for (int m2 = 1; m2 <= 30; ++m2) {
    cfg.gauss.m2_values.push_back(m2);
  }
  return cfg;
}

ExperimentConfig default_antenna_config() {
  ExperimentConfig cfg;
  cfg.kind = "antenna";
  return cfg;
}

namespace {

void validate(const ExperimentConfig& cfg) {
  if (cfg.kind != "gauss-sweep" && cfg.kind != "antenna") {
    throw ConfigError("config: experiment must be 'gauss-sweep' or 'antenna'");
  }
  const auto& s = cfg.solver.nonconvex;
  if (s.max_iterations < 1 || s.memory < 1 || s.gradient_tolerance <= 0.0 ||
      cfg.solver.spectral_iterations < 1) {
    throw ConfigError("config: invalid solver settings");
  }
  if (cfg.kind == "gauss-sweep") {
    const auto& g = cfg.gauss;
    if (g.n < 1 || g.m1 < 0 || g.trials < 1 || g.m2_values.empty() || g.methods.empty()) {
      throw ConfigError("config: gauss sweep needs n >= 1, m1 >= 0, trials >= 1, "
                        "nonempty m2 list and methods");
    }
    for (int m2 : g.m2_values) {
      if (m2 < 1) {
        throw ConfigError("config: sweep values must be positive");
      }
    }
  } else {
    const auto& a = cfg.antenna;
    if (a.trials < 1 || a.methods.empty()) {
      throw ConfigError("config: antenna benchmark needs trials >= 1 and methods");
    }
    if (a.sites < 1 || a.samples_per_set < 1 || a.frequency_hz <= 0.0 ||
        a.box_size_m <= 0.0 || a.sphere_radius_m <= a.box_size_m || a.generation_density < 1) {
      throw ConfigError("config: invalid antenna scenario");
    }
    if (a.probe_offsets_m.size() < 3) {
      throw ConfigError("config: probe array needs at least three elements");
    }
    if (a.probe_offsets_m.front() != Eigen::Vector2d(0.0, 0.0)) {
      throw ConfigError("config: first probe element must sit at (0, 0)");
    }
    if (a.ff_theta_step_deg <= 0.0) {
      throw ConfigError("config: ff_theta_step_deg must be positive");
    }
  }
}

std::vector<Method> parse_methods(const json& j, const char* where) {
  std::vector<Method> out;
  if (!j.is_array()) {
    throw ConfigError(std::string("config: ") + where + ".methods must be an array");
  }
  for (const auto& item : j) {
    out.push_back(method_from_name(item.get<std::string>()));
  }
  return out;
}

double parse_snr(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") {
      return std::numeric_limits<double>::infinity();
    }
    throw ConfigError("config: snr_db must be a number or \"inf\"");
  }
  return j.get<double>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  try {
    if (!j.contains("experiment")) {
      throw ConfigError("config: missing 'experiment' field");
    }
    const std::string kind = j["experiment"].get<std::string>();
    ExperimentConfig cfg =
        (kind == "antenna") ? default_antenna_config() : default_gauss_config();
    cfg.kind = kind;
    cfg.seed = j.value("seed", cfg.seed);
    cfg.timing = j.value("timing", cfg.timing);

    if (j.contains("solver")) {
      const auto& s = j["solver"];
      auto& nc = cfg.solver.nonconvex;
      nc.max_iterations = s.value("max_iterations", nc.max_iterations);
      nc.memory = s.value("memory", nc.memory);
      nc.gradient_tolerance = s.value("gradient_tolerance", nc.gradient_tolerance);
      nc.line_search.sufficient_decrease =
          s.value("wolfe_c1", nc.line_search.sufficient_decrease);
      nc.line_search.curvature = s.value("wolfe_c2", nc.line_search.curvature);
      nc.line_search.max_evaluations =
          s.value("line_search_evaluations", nc.line_search.max_evaluations);
      cfg.solver.spectral_iterations =
          s.value("spectral_iterations", cfg.solver.spectral_iterations);
    }

    if (j.contains("gauss")) {
      const auto& g = j["gauss"];
      cfg.gauss.n = g.value("n", cfg.gauss.n);
      cfg.gauss.m1 = g.value("m1", cfg.gauss.m1);
      cfg.gauss.trials = g.value("trials", cfg.gauss.trials);
      cfg.gauss.success_threshold_db =
          g.value("threshold_db", cfg.gauss.success_threshold_db);
      if (g.contains("m2")) {
        cfg.gauss.m2_values.clear();
        if (g["m2"].is_array()) {
          for (const auto& v : g["m2"]) {
            cfg.gauss.m2_values.push_back(v.get<int>());
          }
        } else {
          const int from = g["m2"].value("from", 1);
          const int to = g["m2"].at("to").get<int>();
          const int step = g["m2"].value("step", 1);
          if (step < 1) {
            throw ConfigError("config: m2.step must be >= 1");
          }
          for (int v = from; v <= to; v += step) {
            cfg.gauss.m2_values.push_back(v);
          }
        }
      }
      if (g.contains("methods")) {
        cfg.gauss.methods = parse_methods(g["methods"], "gauss");
      }
    }

    if (j.contains("antenna")) {
      const auto& a = j["antenna"];
      auto& ac = cfg.antenna;
      ac.frequency_hz = a.value("frequency_hz", ac.frequency_hz);
      ac.box_size_m = a.value("box_size_m", ac.box_size_m);
      ac.sites = a.value("sites", ac.sites);
      ac.sphere_radius_m = a.value("sphere_radius_m", ac.sphere_radius_m);
      ac.samples_per_set = a.value("samples_per_set", ac.samples_per_set);
      if (a.contains("snr_db")) {
        ac.snr_db = parse_snr(a["snr_db"]);
      }
      ac.generation_density = a.value("generation_density", ac.generation_density);
      ac.generation_jitter_rel = a.value("generation_jitter_rel", ac.generation_jitter_rel);
      if (a.contains("probe_offsets_m")) {
        ac.probe_offsets_m.clear();
        for (const auto& o : a["probe_offsets_m"]) {
          if (!o.is_array() || o.size() != 2) {
            throw ConfigError("config: probe offsets must be [u, v] pairs");
          }
          ac.probe_offsets_m.emplace_back(o[0].get<double>(), o[1].get<double>());
        }
      }
      ac.trials = a.value("trials", ac.trials);
      if (a.contains("methods")) {
        ac.methods = parse_methods(a["methods"], "antenna");
      }
      ac.ff_phi_deg = a.value("ff_phi_deg", ac.ff_phi_deg);
      ac.ff_theta_step_deg = a.value("ff_theta_step_deg", ac.ff_theta_step_deg);
      ac.write_ff_cuts = a.value("write_ff_cuts", ac.write_ff_cuts);
    }

    validate(cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path.string() + ": cannot open config file");
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text, path.string());
}

namespace {

struct MethodOutcome {
  ComplexVector z;
  int iterations = 0;
  double wall_ms = 0.0;
};

/// Runs every requested method on one partial-coherence instance. The linear
/// solve is shared between the raw and refined variants.
std::map<Method, MethodOutcome> run_methods(
    const std::vector<Method>& methods, const ComplexMatrix& A,
    const std::vector<ComplexMatrix>& blocks, const std::vector<ComplexVector>& b_blocks,
    const ComplexVector& b_measured, const CoherenceStructure& structure,
    const SolverConfig& solver, bool timing) {
  std::map<Method, MethodOutcome> out;
  const MagnitudePhaseData data = extract_phase_data(b_measured, structure);

  const bool want_linear = std::count(methods.begin(), methods.end(), Method::LinearPc) ||
                           std::count(methods.begin(), methods.end(), Method::LinearPcRaw);
  if (want_linear) {
    Stopwatch sw(timing);
    const int s = choose_anchor(structure, data);
    const SolveReport rep = solve_linear_pc(A, data, structure, s);
    const double raw_ms = sw.elapsed_ms();
    if (std::count(methods.begin(), methods.end(), Method::LinearPcRaw)) {
      out[Method::LinearPcRaw] = {rep.solution.z, rep.iterations_used, raw_ms};
    }
    if (std::count(methods.begin(), methods.end(), Method::LinearPc)) {
      const auto refined = coherent_resolve(A, data, structure, rep.solution.psi);
      out[Method::LinearPc] = {refined.value_or(rep.solution.z), rep.iterations_used,
                               sw.elapsed_ms()};
    }
  }
  for (Method m : methods) {
    if (m == Method::LinearPc || m == Method::LinearPcRaw) {
      continue;
    }
    Stopwatch sw(timing);
    MethodOutcome o;
    switch (m) {
      case Method::Coherent: {
        o.z = least_squares_solve(A, b_measured);
        break;
      }
      case Method::NonconvexAugmented: {
        const AugmentedSystem aug = build_augmented_system(blocks, b_blocks, {{1, 2}});
        const ComplexVector z0 =
            spectral_initialize(aug.A, aug.magnitudes, solver.spectral_iterations);
        const SolveReport rep = solve_nonconvex(aug.A, aug.magnitudes, z0, solver.nonconvex);
        o.z = rep.solution.z;
        o.iterations = rep.iterations_used;
        break;
      }
      case Method::NonconvexIncoherent: {
        const RealVector mags = b_measured.cwiseAbs();
        const ComplexVector z0 = spectral_initialize(A, mags, solver.spectral_iterations);
        const SolveReport rep = solve_nonconvex(A, mags, z0, solver.nonconvex);
        o.z = rep.solution.z;
        o.iterations = rep.iterations_used;
        break;
      }
      default:
        continue;
    }
    o.wall_ms = sw.elapsed_ms();
    out[m] = std::move(o);
  }
  return out;
}

}  // namespace

GaussSweepResult run_gauss_sweep(const ExperimentConfig& config, int threads) {
  validate(config);
  if (config.kind != "gauss-sweep") {
    throw ConfigError("run_gauss_sweep: config kind is '" + config.kind + "'");
  }
  const auto& g = config.gauss;
  const int points = static_cast<int>(g.m2_values.size());
  const int methods_n = static_cast<int>(g.methods.size());
  const int tasks = points * g.trials;

  GaussSweepResult result;
  result.records.resize(static_cast<std::size_t>(tasks) * methods_n);

  parallel_for(tasks, threads, [&](int task) {
    const int ip = task / g.trials;
    const int trial = task % g.trials;
    const int m2 = g.m2_values[static_cast<std::size_t>(ip)];
    const int m = g.m1 + 2 * m2;
    const std::uint64_t seed =
        derive_seed(config.seed, kStreamGaussTrial + static_cast<std::uint64_t>(m2), trial);
    const GaussianInstance inst = sample_gaussian_instance(g.n, m, seed);
    const CoherenceStructure structure = sets_structure(g.m1, m2);

    std::vector<ComplexMatrix> blocks = {inst.A.topRows(g.m1), inst.A.middleRows(g.m1, m2),
                                         inst.A.bottomRows(m2)};
    std::vector<ComplexVector> b_blocks = {inst.b_true.head(g.m1),
                                           inst.b_true.segment(g.m1, m2),
                                           inst.b_true.tail(m2)};
    const auto outcomes = run_methods(g.methods, inst.A, blocks, b_blocks, inst.b_true,
                                      structure, config.solver, config.timing);
    for (int mi = 0; mi < methods_n; ++mi) {
      const Method method = g.methods[static_cast<std::size_t>(mi)];
      const auto& o = outcomes.at(method);
      TrialRecord rec;
      rec.point = m2;
      rec.method = method;
      rec.trial = trial;
      rec.seed = seed;
      const DeviationReport dev = compare_fields(inst.A * o.z, inst.b_true);
      rec.eps_c_db = dev.epsilon_c_db;
      rec.eps_m_db = dev.epsilon_m_db;
      rec.iterations = o.iterations;
      rec.wall_time_ms = o.wall_ms;
      result.records[static_cast<std::size_t>(task) * methods_n + mi] = rec;
    }
  });

  // summaries in (point, method) order
  for (int ip = 0; ip < points; ++ip) {
    const int m2 = g.m2_values[static_cast<std::size_t>(ip)];
    for (int mi = 0; mi < methods_n; ++mi) {
      SummaryRow row;
      row.m2 = m2;
      row.m = g.m1 + 2 * m2;
      row.n = g.n;
      row.q = g.m1 + m2;
      row.method = g.methods[static_cast<std::size_t>(mi)];
      row.trials = g.trials;
      for (int t = 0; t < g.trials; ++t) {
        const auto& rec =
            result.records[(static_cast<std::size_t>(ip) * g.trials + t) * methods_n + mi];
        if (rec.eps_c_db < g.success_threshold_db) {
          ++row.successes;
        }
      }
      row.rate = static_cast<double>(row.successes) / g.trials;
      result.summary.push_back(row);
    }
  }
  return result;
}

AntennaResult run_antenna_benchmark(const ExperimentConfig& config, int threads) {
  validate(config);
  if (config.kind != "antenna") {
    throw ConfigError("run_antenna_benchmark: config kind is '" + config.kind + "'");
  }
  const auto& a = config.antenna;
  const int methods_n = static_cast<int>(a.methods.size());

  AntennaResult result;
  result.records.resize(static_cast<std::size_t>(a.trials) * methods_n);
  result.scenario.resize(static_cast<std::size_t>(a.trials));
  std::mutex ff_mutex;

  parallel_for(a.trials, threads, [&](int trial) {
    const std::uint64_t master = derive_seed(config.seed, kStreamAntennaMaster, trial);

    AutBoxSpec gen_spec;
    gen_spec.box_size_m = a.box_size_m;
    gen_spec.sites = a.sites * a.generation_density;
    gen_spec.frequency_hz = a.frequency_hz;
    gen_spec.position_jitter_m = a.generation_jitter_rel * a.box_size_m;
    gen_spec.seed = derive_seed(master, kStreamAutJitter, 0);
    DipoleAUT gen_aut = make_box_aut(gen_spec);
    gen_aut.coefficients = draw_cn_vector(static_cast<Eigen::Index>(gen_aut.dipoles.size()),
                                          derive_seed(master, kStreamAutCoefficients, 0));

    AutBoxSpec inv_spec;
    inv_spec.box_size_m = a.box_size_m;
    inv_spec.sites = a.sites;
    inv_spec.frequency_hz = a.frequency_hz;
    const DipoleAUT inv_aut = make_box_aut(inv_spec);

    const SamplingPlan plan_single = make_random_plan(
        a.sphere_radius_m, a.samples_per_set, derive_seed(master, kStreamPlanSingle, 0));
    const SamplingPlan plan_pair = make_random_plan(
        a.sphere_radius_m, a.samples_per_set, derive_seed(master, kStreamPlanPair, 0));

    const ProbeArrayGeometry array{a.probe_offsets_m};
    const int ms = a.samples_per_set;

    ComplexVector b_true(3 * ms);
    std::vector<ComplexMatrix> blocks(3);
    {
      const ComplexMatrix G1 = build_forward_operator(gen_aut, plan_single, array, 0);
      const ComplexMatrix G2 = build_forward_operator(gen_aut, plan_pair, array, 1);
      const ComplexMatrix G3 = build_forward_operator(gen_aut, plan_pair, array, 2);
      b_true.head(ms) = G1 * gen_aut.coefficients;
      b_true.segment(ms, ms) = G2 * gen_aut.coefficients;
      b_true.tail(ms) = G3 * gen_aut.coefficients;
    }
    blocks[0] = build_forward_operator(inv_aut, plan_single, array, 0);
    blocks[1] = build_forward_operator(inv_aut, plan_pair, array, 1);
    blocks[2] = build_forward_operator(inv_aut, plan_pair, array, 2);
    ComplexMatrix A(3 * ms, blocks[0].cols());
    A.topRows(ms) = blocks[0];
    A.middleRows(ms, ms) = blocks[1];
    A.bottomRows(ms) = blocks[2];

    const double cond = condition_number(A);
    if (cond > 1e12) {
      throw NumericalError("antenna scenario rejected: condition number " +
                           std::to_string(cond) + " exceeds 1e12");
    }
    AntennaSeedInfo info;
    info.trial = trial;
    info.master_seed = master;
    info.condition_number = cond;
    info.n = static_cast<int>(A.cols());
    info.m = static_cast<int>(A.rows());
    info.q = 2 * ms;
    result.scenario[static_cast<std::size_t>(trial)] = info;

    const ComplexVector b_noisy =
        add_noise(b_true, a.snr_db, derive_seed(master, kStreamNoise, 0));
    std::vector<ComplexVector> b_blocks = {b_noisy.head(ms), b_noisy.segment(ms, ms),
                                           b_noisy.tail(ms)};
    const CoherenceStructure structure = sets_structure(ms, ms);

    const auto outcomes = run_methods(a.methods, A, blocks, b_blocks, b_noisy, structure,
                                      config.solver, config.timing);
    for (int mi = 0; mi < methods_n; ++mi) {
      const Method method = a.methods[static_cast<std::size_t>(mi)];
      const auto& o = outcomes.at(method);
      TrialRecord rec;
      rec.point = a.samples_per_set;
      rec.method = method;
      rec.trial = trial;
      rec.seed = master;
      const DeviationReport dev = compare_fields(A * o.z, b_true);
      rec.eps_c_db = dev.epsilon_c_db;
      rec.eps_m_db = dev.epsilon_m_db;
      rec.iterations = o.iterations;
      rec.wall_time_ms = o.wall_ms;
      result.records[static_cast<std::size_t>(trial) * methods_n + mi] = rec;
    }

    if (trial == 0 && a.write_ff_cuts) {
      std::vector<double> grid;
      for (double t = -180.0; t <= 180.0 + 1e-9; t += a.ff_theta_step_deg) {
        grid.push_back(std::min(t, 180.0));
      }
      const FarFieldCut ref = far_field_cut(gen_aut.coefficients, gen_aut, a.ff_phi_deg, grid);
      Eigen::Index peak_ref = 0;
      ref.values.cwiseAbs().maxCoeff(&peak_ref);
      std::scoped_lock lock(ff_mutex);
      for (int mi = 0; mi < methods_n; ++mi) {
        const Method method = a.methods[static_cast<std::size_t>(mi)];
        const FarFieldCut res = far_field_cut(outcomes.at(method).z, inv_aut, a.ff_phi_deg,
                                              grid, ref.component);
        FfCutTrace trace;
        trace.theta_deg = grid;
        trace.deviation_db = ff_cut_deviation(res.values, ref.values);
        Eigen::Index peak_res = 0;
        res.values.cwiseAbs().maxCoeff(&peak_res);
        trace.result = res.values / res.values[peak_res];
        trace.reference = ref.values / ref.values[peak_ref];
        result.ff_cuts[method] = std::move(trace);
      }
    }
  });
  return result;
}

void write_gauss_outputs(const GaussSweepResult& result, const ExperimentConfig& config,
                         const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    auto out = open_out(out_dir / "records.csv");
    out << "m2,method,trial,seed,eps_c_db,eps_m_db,iterations,wall_time_ms\n";
    for (const auto& r : result.records) {
      out << r.point << ',' << method_name(r.method) << ',' << r.trial << ',' << r.seed << ','
          << fmt_db(r.eps_c_db) << ',' << fmt_db(r.eps_m_db) << ',' << r.iterations << ','
          << fmt_fixed(r.wall_time_ms, 3) << '\n';
    }
  }
  {
    auto out = open_out(out_dir / "success_rates.csv");
    out << "m2,m,n,q,method,trials,successes,rate\n";
    for (const auto& s : result.summary) {
      out << s.m2 << ',' << s.m << ',' << s.n << ',' << s.q << ',' << method_name(s.method)
          << ',' << s.trials << ',' << s.successes << ',' << fmt_fixed(s.rate, 6) << '\n';
    }
  }
  (void)config;
}

void write_antenna_outputs(const AntennaResult& result, const ExperimentConfig& config,
                           const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    auto out = open_out(out_dir / "records.csv");
    out << "samples_per_set,method,trial,master_seed,eps_c_db,eps_m_db,iterations,"
           "wall_time_ms\n";
    for (const auto& r : result.records) {
      out << r.point << ',' << method_name(r.method) << ',' << r.trial << ',' << r.seed << ','
          << fmt_db(r.eps_c_db) << ',' << fmt_db(r.eps_m_db) << ',' << r.iterations << ','
          << fmt_fixed(r.wall_time_ms, 3) << '\n';
    }
  }
  {
    auto out = open_out(out_dir / "scenario.csv");
    out << "trial,master_seed,condition_number,n,m,q\n";
    for (const auto& s : result.scenario) {
      char cond[32];
      std::snprintf(cond, sizeof(cond), "%.6e", s.condition_number);
      out << s.trial << ',' << s.master_seed << ',' << cond << ',' << s.n << ',' << s.m << ','
          << s.q << '\n';
    }
  }
  for (const auto& [method, trace] : result.ff_cuts) {
    auto out = open_out(out_dir / ("ff_cut_" + method_name(method) + ".csv"));
    out << "theta_deg,result_db,reference_db,deviation_db\n";
    for (std::size_t i = 0; i < trace.theta_deg.size(); ++i) {
      const double rdb = 20.0 * std::log10(std::abs(trace.result[static_cast<Eigen::Index>(i)]));
      const double fdb =
          20.0 * std::log10(std::abs(trace.reference[static_cast<Eigen::Index>(i)]));
      out << fmt_fixed(trace.theta_deg[i], 3) << ',' << fmt_db(rdb) << ',' << fmt_db(fdb) << ','
          << fmt_db(trace.deviation_db[i]) << '\n';
    }
  }
  (void)config;
}

SolveOutcome run_solve(const SolveFiles& files, const SolverConfig& solver) {
  const ComplexMatrix A = read_matrix_csv(files.operator_csv);
  const ComplexVector v = read_vector_csv(files.magnitudes_csv);
  const CoherenceStructure structure = read_coherence_json(files.coherence_json);
  if (A.rows() != v.size()) {
    throw ConfigError("solve: operator has " + std::to_string(A.rows()) +
                      " rows but measurement vector has " + std::to_string(v.size()));
  }
  if (structure.m != static_cast<int>(A.rows())) {
    throw ConfigError("solve: coherence structure covers " + std::to_string(structure.m) +
                      " measurements, operator has " + std::to_string(A.rows()) + " rows");
  }

  SolveOutcome outcome;
  outcome.method = method_from_name(files.method);
  const MagnitudePhaseData data = extract_phase_data(v, structure);
  switch (outcome.method) {
    case Method::LinearPc:
    case Method::LinearPcRaw: {
      const int s = choose_anchor(structure, data);
      outcome.report = solve_linear_pc(A, data, structure, s);
      outcome.z = outcome.report.solution.z;
      if (outcome.method == Method::LinearPc) {
        if (const auto refined = coherent_resolve(A, data, structure,
                                                  outcome.report.solution.psi)) {
          outcome.z = *refined;
        }
      }
      break;
    }
    case Method::NonconvexAugmented: {
      const AugmentedSystem aug = build_augmented_system(A, data, structure);
      const ComplexVector z0 =
          spectral_initialize(aug.A, aug.magnitudes, solver.spectral_iterations);
      outcome.report = solve_nonconvex(aug.A, aug.magnitudes, z0, solver.nonconvex);
      outcome.z = outcome.report.solution.z;
      break;
    }
    case Method::NonconvexIncoherent: {
      const ComplexVector z0 =
          spectral_initialize(A, data.magnitudes, solver.spectral_iterations);
      outcome.report = solve_nonconvex(A, data.magnitudes, z0, solver.nonconvex);
      outcome.z = outcome.report.solution.z;
      break;
    }
    case Method::Coherent: {
      outcome.z = least_squares_solve(A, v);
      outcome.report.solution.z = outcome.z;
      break;
    }
  }

  if (files.reference_csv) {
    const ComplexVector ref = read_vector_csv(*files.reference_csv);
    if (ref.size() != A.rows()) {
      throw ConfigError("solve: reference length does not match operator rows");
    }
    outcome.deviation = compare_fields(A * outcome.z, ref);
  }
  if (files.solution_out) {
    write_vector_csv(*files.solution_out, outcome.z);
  }
  return outcome;
}

int env_thread_count() {
  if (const char* env = std::getenv("PHASERET_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) {
      return v;
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace phaseret
