#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sipm/barrier.hpp"
#include "sipm/baselines.hpp"
#include "sipm/bounds.hpp"
#include "sipm/libsvm.hpp"
#include "sipm/problems.hpp"
#include "sipm/schedules.hpp"
#include "sipm/solver.hpp"

namespace sipm {

using Json = nlohmann::ordered_json;

struct EstimatedConstants {
  double ell_f_bar = 1.0;
  double kappa_inf_bar = 1.0;
  double sigma_inf_bar = 0.0;

  friend bool operator==(const EstimatedConstants&, const EstimatedConstants&) = default;
};

struct BootstrapConfig {
  std::size_t iterations = 500;
  std::size_t noise_batches = 100;
  std::uint64_t seed = 0;
  double batch_fraction = 0.01;
  double delta_cap = 100.0;
  Setting mode = Setting::deterministic;
};

/// Seeded uniform point in [-0.01, 0.01]^n.
inline Vector initial_point(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  Vector x(n);
  for (double& v : x) v = u(rng);
  return x;
}

/// (a - b) / max{a, b, 1}
inline double relative_performance(double a, double b) {
  if (a < 0 || b < 0) throw Error(Errc::invalid_argument, "r_p needs nonnegative values");
  return (a - b) / std::max({a, b, 1.0});
}

/// The schedule used while estimating constants: practical staircase with
/// placeholder constants ell = kappa = 1, sigma = 0.
inline SolverConfig bootstrap_solver_config(const Objective& objective, std::span<const double> x1,
                                            const Bounds& bounds, const BootstrapConfig& cfg) {
  const double delta = range_gap(bounds, cfg.delta_cap);
  const double mu1 = mu1_init(objective.gradient(x1), x1, bounds);
  const double theta0 = theta0_init(x1, bounds, 1.0, 0.0, mu1, delta);
  SolverConfig sc;
  sc.mode = Setting::deterministic;
  sc.param_mode = ParamMode::practical;
  sc.schedule = build_staircase(mu1, cfg.iterations, theta0);
  sc.buffers.mode = ParamMode::practical;
  sc.buffers.maxiter = cfg.iterations;
  sc.constants = {1.0, 1.0, 0.0};
  sc.delta_cap = cfg.delta_cap;
  sc.maxiter = cfg.iterations;
  return sc;
}

/// kappa = max ||grad f(x_k)||_inf over the bootstrap iterates x_1..x_K,
/// ell = max secant ratio of consecutive iterates, sigma = max
/// ||g - grad f(x1)||_inf over seeded batches at x1.
/// Secants are skipped when the displacement is below 1e-14 or below
/// 1e-8 max(1, ||x||), where rounding in the gradient difference dominates.
/// A zero kappa or an empty secant set falls back to 1.
inline EstimatedConstants estimate_constants(const Objective& objective, std::span<const double> x1,
                                             const Bounds& bounds, const BootstrapConfig& cfg) {
  const SolverConfig sc = bootstrap_solver_config(objective, x1, bounds, cfg);
  SipmStepper stepper(sc, bounds);
  EstimatedConstants out;
  double kappa = 0.0;
  double ell = 0.0;
  bool have_secant = false;
  SolverState state{Vector(x1.begin(), x1.end()), 1};
  Vector prev_x, prev_g;
  for (std::size_t k = 1; k <= cfg.iterations; ++k) {
    const Vector g = objective.gradient(state.x);
    for (double v : g) kappa = std::max(kappa, std::abs(v));
    if (!prev_x.empty()) {
      double dx = 0.0, dg = 0.0, xx = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        dx += (state.x[i] - prev_x[i]) * (state.x[i] - prev_x[i]);
        dg += (g[i] - prev_g[i]) * (g[i] - prev_g[i]);
        xx += state.x[i] * state.x[i];
      }
      dx = std::sqrt(dx);
      if (dx >= 1e-14 && dx >= 1e-8 * std::max(1.0, std::sqrt(xx))) {
        ell = std::max(ell, std::sqrt(dg) / dx);
        have_secant = true;
      }
    }
    prev_x = state.x;
    prev_g = g;
    state = stepper.step(state, g).next;
  }
  out.kappa_inf_bar = kappa > 0 ? kappa : 1.0;
  out.ell_f_bar = have_secant && ell > 0 ? ell : 1.0;

  out.sigma_inf_bar = 0.0;
  if (cfg.mode == Setting::stochastic && objective.sample_count() > 0) {
    const Vector g1 = objective.gradient(x1);
    BatchSampler sampler(objective.sample_count(),
                         batch_size_for(objective.sample_count(), cfg.batch_fraction), cfg.seed);
    for (std::size_t j = 0; j < cfg.noise_batches; ++j) {
      const auto batch = sampler.next();
      const Vector g = objective.stochastic_gradient(x1, batch);
      for (std::size_t i = 0; i < g.size(); ++i) {
        out.sigma_inf_bar = std::max(out.sigma_inf_bar, std::abs(g[i] - g1[i]));
      }
    }
  }
  return out;
}

/// On-disk cache of estimated constants keyed by (dataset, model, seed).
class ConstantsCache {
 public:
  explicit ConstantsCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;
    try {
      in >> data_;
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::io_error, "constants cache " + path_ + " is unreadable: " + e.what());
    }
  }

  static std::string key(const std::string& dataset, const std::string& model,
                         std::uint64_t seed) {
    return dataset + "|" + model + "|" + std::to_string(seed);
  }

  std::optional<EstimatedConstants> find(const std::string& k) const {
    if (!data_.is_object() || !data_.contains(k)) return std::nullopt;
    const Json& e = data_.at(k);
    return EstimatedConstants{e.at("ell_f_bar").get<double>(), e.at("kappa_inf_bar").get<double>(),
                              e.at("sigma_inf_bar").get<double>()};
  }

  void store(const std::string& k, const EstimatedConstants& c) {
    if (!data_.is_object()) data_ = Json::object();
    data_[k] = {{"ell_f_bar", c.ell_f_bar},
                {"kappa_inf_bar", c.kappa_inf_bar},
                {"sigma_inf_bar", c.sigma_inf_bar}};
    std::ofstream out(path_);
    if (!out) throw Error(Errc::io_error, "cannot write constants cache " + path_);
    out << data_.dump(2) << '\n';
  }

 private:
  std::string path_;
  Json data_ = Json::object();
};

enum class ModelKind { quadratic, logistic, nn };
enum class SolverKind { sipm, psgm, proj_ipm };
enum class ScheduleKind { power, staircase };

inline std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::quadratic: return "quadratic";
    case ModelKind::logistic: return "logistic";
    case ModelKind::nn: return "nn";
  }
  return "?";
}
inline std::string to_string(SolverKind s) {
  switch (s) {
    case SolverKind::sipm: return "sipm";
    case SolverKind::psgm: return "psgm";
    case SolverKind::proj_ipm: return "proj-ipm";
  }
  return "?";
}

struct ExperimentSpec {
  ModelKind model = ModelKind::logistic;
  std::vector<SolverKind> solvers{SolverKind::sipm, SolverKind::psgm};
  Setting mode = Setting::deterministic;
  std::optional<std::string> train_path;
  std::optional<std::string> test_path;
  // Synthetic data when no training file is given.
  std::size_t synthetic_samples = 200;
  std::size_t synthetic_features = 5;
  std::size_t quadratic_dim = 5;
  std::uint64_t data_seed = 1;
  std::uint64_t init_seed = 0;
  std::optional<std::size_t> maxiter;
  double epochs = 1.0;
  double batch_fraction = 0.01;
  std::vector<std::uint64_t> seeds{0};
  double lower = -1.0;
  double upper = 1.0;
  ExponentTriple exponents{-1.0, -1.0, 0.0};
  ScheduleKind schedule = ScheduleKind::staircase;
  ParamMode param_mode = ParamMode::practical;
  double alpha_buff_base = 1.0;
  double gamma_buff_base = 1.0;
  AuditLevel audit = AuditLevel::off;
  bool trace = false;
  std::optional<std::string> cache_path;

  /// Explicit maxiter wins; otherwise stochastic runs use epochs / batch
  /// fraction and deterministic runs default to 100.
  std::size_t resolved_maxiter() const {
    if (maxiter) return *maxiter;
    if (mode == Setting::stochastic) {
      return static_cast<std::size_t>(std::llround(epochs / batch_fraction));
    }
    return 100;
  }
};

struct Problem {
  std::string dataset;
  std::shared_ptr<const Objective> train;
  std::shared_ptr<const Objective> test;
  Bounds bounds;
};

inline SparseDataset read_libsvm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  return parse_libsvm(in);
}

inline std::shared_ptr<const Objective> make_dataset_objective(ModelKind model,
                                                               std::shared_ptr<const SparseDataset> d,
                                                               const LabelMap& labels) {
  if (model == ModelKind::nn) return std::make_shared<NeuralNetObjective>(d, labels);
  return std::make_shared<LogisticObjective>(d, labels);
}

inline Problem build_problem(const ExperimentSpec& spec) {
  Problem p{"", nullptr, nullptr, Bounds::uniform(1, -1, 1)};
  if (spec.model == ModelKind::quadratic) {
    const std::size_t n = spec.quadratic_dim;
    std::mt19937_64 rng(spec.data_seed);
    std::uniform_real_distribution<double> where(0.25, 0.75);
    std::uniform_real_distribution<double> curv(0.5, 2.0);
    Vector center(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
      center[i] = spec.lower + (spec.upper - spec.lower) * where(rng);
      c[i] = curv(rng);
    }
    p.dataset = "quadratic-" + std::to_string(n) + "-" + std::to_string(spec.data_seed);
    p.train = std::make_shared<QuadraticObjective>(center, c, 1.0, 100, spec.data_seed + 1);
    p.bounds = Bounds::uniform(n, spec.lower, spec.upper);
    return p;
  }
  SparseDataset train, test;
  bool has_test = false;
  if (spec.train_path) {
    p.dataset = *spec.train_path;
    train = read_libsvm_file(*spec.train_path);
    if (spec.test_path) {
      test = read_libsvm_file(*spec.test_path);
      has_test = true;
    }
  } else {
    p.dataset = "synthetic-" + std::to_string(spec.synthetic_samples) + "x" +
                std::to_string(spec.synthetic_features) + "-" + std::to_string(spec.data_seed);
    train = make_synthetic_classification(spec.synthetic_samples, spec.synthetic_features,
                                          spec.data_seed);
  }
  LabelMap labels;
  if (has_test) {
    AlignedData aligned = align_feature_space(std::move(train), std::move(test));
    labels = aligned.labels;
    train = std::move(aligned.train);
    test = std::move(aligned.test);
  } else {
    labels = LabelMap::from(train);
  }
  auto train_ptr = std::make_shared<const SparseDataset>(std::move(train));
  p.train = make_dataset_objective(spec.model, train_ptr, labels);
  if (has_test) {
    p.test = make_dataset_objective(spec.model, std::make_shared<const SparseDataset>(std::move(test)),
                                    labels);
  }
  p.bounds = Bounds::uniform(p.train->dimension(), spec.lower, spec.upper);
  return p;
}

struct RunRecord {
  SolverKind solver = SolverKind::sipm;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  RunResult result;
  std::optional<double> test_objective;
  double seconds = 0.0;
};

struct Comparison {
  std::string metric;
  std::string solver_a;
  std::string solver_b;
  std::uint64_t seed = 0;
  double r_p = 0.0;
};

struct ComparisonReport {
  Json config;
  EstimatedConstants constants;
  bool constants_cached = false;
  std::vector<RunRecord> runs;
  std::vector<Comparison> comparisons;
  bool with_trace = false;
};

namespace detail {

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json record_json(const IterationRecord& r) {
  return {{"k", r.k},
          {"mu_k", finite_or_null(r.mu_k)},
          {"theta_k", finite_or_null(r.theta_k)},
          {"alpha_k", finite_or_null(r.alpha_k)},
          {"gamma_k", finite_or_null(r.gamma_k)},
          {"ell_k", finite_or_null(r.ell_k)},
          {"q_norm", finite_or_null(r.q_norm)},
          {"phi_tilde", finite_or_null(r.phi_tilde)},
          {"stalled", r.stalled},
          {"alpha_min", finite_or_null(r.alpha_min)},
          {"alpha_max", finite_or_null(r.alpha_max)},
          {"alpha_pre", finite_or_null(r.alpha_pre)},
          {"gamma_bar", finite_or_null(r.gamma_bar)},
          {"gamma_min", finite_or_null(r.gamma_min)},
          {"gamma_max", finite_or_null(r.gamma_max)},
          {"lambda_min", finite_or_null(r.lambda_min)}};
}

inline const char* setting_name(Setting s) {
  return s == Setting::deterministic ? "det" : "stoch";
}

}  // namespace detail

/// Runs every (solver, seed) cell on one problem. Deterministic specs use
/// seeds[0] only. Cell failures are recorded, not rethrown.
inline ComparisonReport run_experiment(const ExperimentSpec& spec) {
  ComparisonReport report;
  report.with_trace = spec.trace;
  const Problem problem = build_problem(spec);
  const Objective& f = *problem.train;
  const Bounds& bounds = problem.bounds;
  const std::size_t n = f.dimension();
  const std::size_t maxiter = spec.resolved_maxiter();

  const Vector x1 = initial_point(n, spec.init_seed);
  if (!strictly_interior(x1, bounds)) {
    throw Error(Errc::infeasible_start, "the initial point box [-0.01, 0.01] is not interior");
  }

  // Constants: estimated once per (dataset, model, bootstrap seed); sigma is
  // always estimated so one cache entry serves both settings.
  BootstrapConfig boot;
  boot.seed = spec.init_seed;
  boot.batch_fraction = spec.batch_fraction;
  boot.mode = Setting::stochastic;
  std::optional<ConstantsCache> cache;
  if (spec.cache_path) cache.emplace(*spec.cache_path);
  const std::string key = ConstantsCache::key(problem.dataset, to_string(spec.model), boot.seed);
  EstimatedConstants est;
  if (auto hit = cache ? cache->find(key) : std::nullopt) {
    est = *hit;
    report.constants_cached = true;
  } else {
    est = estimate_constants(f, x1, bounds, boot);
    if (cache) cache->store(key, est);
  }
  report.constants = est;
  const double sigma = spec.mode == Setting::stochastic ? est.sigma_inf_bar : 0.0;

  const double delta = range_gap(bounds, 100.0);
  const double mu1 = std::max(mu1_init(f.gradient(x1), x1, bounds), kFinalBarrier);
  const double theta0 = theta0_init(x1, bounds, est.kappa_inf_bar, sigma, mu1, delta);

  SolverConfig sc;
  sc.mode = spec.mode;
  sc.param_mode = spec.param_mode;
  if (spec.schedule == ScheduleKind::staircase) {
    sc.schedule = build_staircase(mu1, maxiter, theta0);
  } else {
    sc.schedule = PowerSchedule{mu1, theta0, spec.exponents};
  }
  sc.buffers.mode = spec.param_mode;
  sc.buffers.maxiter = maxiter;
  sc.buffers.t_mu = spec.exponents.t_mu;
  const bool det_theory = spec.param_mode == ParamMode::theory && spec.mode == Setting::deterministic;
  sc.buffers.alpha_buff_base = det_theory ? kInf : spec.alpha_buff_base;
  sc.buffers.gamma_buff_base = det_theory ? kInf : spec.gamma_buff_base;
  sc.constants = {est.ell_f_bar, est.kappa_inf_bar, sigma};
  sc.maxiter = maxiter;
  sc.batch_fraction = spec.batch_fraction;
  sc.audit = spec.audit;
  sc.strict_audit = false;
  sc.keep_records = spec.trace;

  const double c_link = c_constant(bounds, est.kappa_inf_bar + sigma, mu1);

  Json& cfg = report.config;
  cfg["model"] = to_string(spec.model);
  cfg["dataset"] = problem.dataset;
  cfg["dimension"] = n;
  cfg["mode"] = detail::setting_name(spec.mode);
  cfg["param_mode"] = spec.param_mode == ParamMode::theory ? "theory" : "practical";
  cfg["schedule"] = spec.schedule == ScheduleKind::staircase ? "staircase" : "power";
  cfg["exponents"] = {{"t_mu", spec.exponents.t_mu},
                      {"t_theta", spec.exponents.t_theta},
                      {"t_alpha", spec.exponents.t_alpha}};
  cfg["maxiter"] = maxiter;
  cfg["epochs"] = spec.epochs;
  cfg["batch_fraction"] = spec.batch_fraction;
  cfg["batch_size"] = f.sample_count() > 0 ? batch_size_for(f.sample_count(), spec.batch_fraction) : 0;
  cfg["bounds"] = {spec.lower, spec.upper};
  cfg["seeds"] = spec.seeds;
  cfg["init_seed"] = spec.init_seed;
  cfg["data_seed"] = spec.data_seed;
  cfg["mu1"] = mu1;
  cfg["theta0"] = theta0;
  cfg["delta"] = delta;
  if (const auto* st = std::get_if<StaircaseSchedule>(&sc.schedule)) {
    cfg["staircase"] = {{"levels", st->levels},
                        {"repetition_length", st->repetition_length},
                        {"degenerate", st->degenerate}};
  }
  cfg["buffers"] = {{"alpha_buff_base", detail::finite_or_null(sc.buffers.alpha_buff_base)},
                    {"gamma_buff_base", detail::finite_or_null(sc.buffers.gamma_buff_base)}};
  cfg["audit"] = spec.audit == AuditLevel::off ? "off"
                 : spec.audit == AuditLevel::invariants ? "invariants" : "full";
  cfg["psgm_step_link"] = "alpha_k = A s_k^p matching SIPM alpha_1 and alpha_maxiter";
  cfg["theta_link_c"] = c_link;
  cfg["theta_link_c_capped"] = c_link >= kThetaLinkCap;
  cfg["bootstrap"] = {{"iterations", boot.iterations},
                      {"noise_batches", boot.noise_batches},
                      {"schedule", "staircase"},
                      {"placeholder_constants", {{"ell_f", 1.0}, {"kappa_inf", 1.0}, {"sigma_inf", 0.0}}},
                      {"seed", boot.seed}};
  std::vector<std::string> solver_names;
  for (SolverKind s : spec.solvers) solver_names.push_back(to_string(s));
  cfg["solvers"] = solver_names;

  std::vector<std::uint64_t> seeds = spec.seeds;
  if (seeds.empty()) seeds.push_back(0);
  if (spec.mode == Setting::deterministic) seeds.resize(1);

  const auto context = [&](SolverKind s, std::uint64_t seed) {
    return problem.dataset + "/" + to_string(s) + "/seed " + std::to_string(seed) + ": ";
  };

  for (std::uint64_t seed : seeds) {
    SolverConfig cell = sc;
    cell.seed = seed;
    std::optional<RunResult> sipm_run;
    const auto get_sipm = [&]() -> const RunResult& {
      if (!sipm_run) sipm_run = run_sipm(f, bounds, cell, x1);
      return *sipm_run;
    };
    for (SolverKind solver : spec.solvers) {
      RunRecord rec;
      rec.solver = solver;
      rec.seed = seed;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        if (solver == SolverKind::sipm) {
          rec.result = get_sipm();
        } else {
          BaselineConfig bc;
          bc.mode = spec.mode;
          bc.maxiter = maxiter;
          bc.seed = seed;
          bc.batch_fraction = spec.batch_fraction;
          bc.keep_records = spec.trace;
          if (solver == SolverKind::psgm) {
            bc.kind = BaselineKind::psgm;
            const RunResult& ref = get_sipm();
            if (maxiter > 0) {
              bc.step_schedule =
                  psgm_step_sizes(cell.schedule, maxiter, ref.first_alpha, ref.last_alpha);
            }
          } else {
            bc.kind = BaselineKind::simplified_ipm;
            bc.mu_schedule = cell.schedule;
            bc.ell_f = est.ell_f_bar;
            bc.kappa_inf = est.kappa_inf_bar + sigma;
            bc.theta_link_c = c_link;
          }
          rec.result = run_baseline(f, bounds, bc, x1);
        }
        if (problem.test) rec.test_objective = problem.test->value(rec.result.final_x);
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = context(solver, seed) + e.what();
      }
      rec.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      report.runs.push_back(std::move(rec));
    }
  }

  // r_p of SIPM against each baseline, per seed and metric.
  for (const RunRecord& a : report.runs) {
    if (a.solver != SolverKind::sipm || !a.ok) continue;
    for (const RunRecord& b : report.runs) {
      if (b.solver == SolverKind::sipm || !b.ok || b.seed != a.seed) continue;
      const auto add = [&](const char* metric, double va, double vb) {
        report.comparisons.push_back(
            {metric, to_string(a.solver), to_string(b.solver), a.seed, relative_performance(va, vb)});
      };
      // Objectives can be negative for general models; r_p is defined for
      // nonnegative values, which holds for every model shipped here.
      add("final_objective_train", a.result.final_objective, b.result.final_objective);
      if (a.test_objective && b.test_objective) {
        add("final_objective_test", *a.test_objective, *b.test_objective);
      }
      add("projected_grad_norm", a.result.final_projected_grad_norm,
          b.result.final_projected_grad_norm);
    }
  }
  return report;
}

/// Report without wall times; identical inputs give identical output.
inline Json report_json(const ComparisonReport& r) {
  Json j;
  j["config"] = r.config;
  j["constants"] = {{"ell_f_bar", r.constants.ell_f_bar},
                    {"kappa_inf_bar", r.constants.kappa_inf_bar},
                    {"sigma_inf_bar", r.constants.sigma_inf_bar},
                    {"cached", r.constants_cached}};
  Json runs = Json::array();
  for (const RunRecord& rec : r.runs) {
    Json run;
    run["solver"] = to_string(rec.solver);
    run["seed"] = rec.seed;
    run["status"] = rec.ok ? "ok" : "failed";
    if (!rec.ok) {
      run["error"] = rec.error;
      runs.push_back(run);
      continue;
    }
    const RunResult& res = rec.result;
    run["final_objective_train"] = detail::finite_or_null(res.final_objective);
    if (rec.test_objective) run["final_objective_test"] = detail::finite_or_null(*rec.test_objective);
    run["projected_grad_norm"] = detail::finite_or_null(res.final_projected_grad_norm);
    run["kkt_stationarity"] =
        res.final_kkt ? detail::finite_or_null(res.final_kkt->stationarity_residual) : Json(nullptr);
    run["stalls"] = res.stall_count;
    run["iterations"] = res.iterations;
    run["audit_violations"] = res.violations.size();
    runs.push_back(run);
  }
  j["runs"] = runs;
  Json comps = Json::array();
  for (const Comparison& c : r.comparisons) {
    comps.push_back({{"metric", c.metric},
                     {"solver_a", c.solver_a},
                     {"solver_b", c.solver_b},
                     {"seed", c.seed},
                     {"r_p", c.r_p}});
  }
  j["comparisons"] = comps;
  if (r.with_trace) {
    Json trace = Json::array();
    for (const RunRecord& rec : r.runs) {
      for (const IterationRecord& it : rec.result.records) {
        Json row = detail::record_json(it);
        row["solver"] = to_string(rec.solver);
        row["seed"] = rec.seed;
        trace.push_back(row);
      }
    }
    j["trace"] = trace;
  }
  return j;
}

inline Json timing_json(const ComparisonReport& r) {
  Json t = Json::array();
  for (const RunRecord& rec : r.runs) {
    t.push_back({{"solver", to_string(rec.solver)}, {"seed", rec.seed}, {"seconds", rec.seconds}});
  }
  return t;
}

/// Full document: the deterministic report plus a separate timing block.
inline std::string render_json(const ComparisonReport& r, bool with_timing = true) {
  Json j = report_json(r);
  if (with_timing) j["timing"] = timing_json(r);
  return j.dump(2) + "\n";
}

/// One row per run.
inline std::string render_csv(const ComparisonReport& r) {
  std::ostringstream out;
  out << "solver,seed,status,final_objective_train,final_objective_test,projected_grad_norm,"
         "kkt_stationarity,stalls,iterations,audit_violations\n";
  const auto num = [](std::optional<double> v) {
    if (!v || !std::isfinite(*v)) return std::string();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return std::string(buf);
  };
  for (const RunRecord& rec : r.runs) {
    const RunResult& res = rec.result;
    out << to_string(rec.solver) << ',' << rec.seed << ',' << (rec.ok ? "ok" : "failed") << ',';
    if (rec.ok) {
      out << num(res.final_objective) << ',' << num(rec.test_objective) << ','
          << num(res.final_projected_grad_norm) << ','
          << num(res.final_kkt ? std::optional<double>(res.final_kkt->stationarity_residual)
                               : std::nullopt)
          << ',' << res.stall_count << ',' << res.iterations << ',' << res.violations.size();
    } else {
      out << ",,,,,,";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace sipm
