#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sipm/sipm.hpp"

namespace {

struct Options {
  std::string model = "logistic";
  std::vector<std::string> solvers;
  std::string mode = "det";
  std::string train, test;
  std::size_t maxiter = 0;
  double epochs = 1.0;
  double batch_frac = 0.01;
  std::vector<std::uint64_t> seeds{0};
  std::vector<double> bounds{-1.0, 1.0};
  double t_mu = -1.0, t_theta = -1.0, t_alpha = 0.0;
  std::string schedule = "staircase";
  std::string param_mode = "practical";
  std::string audit = "off";
  std::string out;
  std::string format = "json";
  std::size_t dim = 5;
  std::size_t samples = 200;
  std::size_t features = 5;
  std::uint64_t data_seed = 1;
  std::uint64_t init_seed = 0;
  double alpha_buff_base = 1.0;
  double gamma_buff_base = 1.0;
  bool trace = false;
  std::string cache;
};

void add_experiment_flags(CLI::App* app, Options& o, bool many_solvers) {
  app->add_option("--model", o.model, "Objective")
      ->check(CLI::IsMember({"quadratic", "logistic", "nn"}));
  auto* s = app->add_option("--solver", o.solvers, "Solver(s)")
                ->check(CLI::IsMember({"sipm", "psgm", "proj-ipm"}));
  if (!many_solvers) s->expected(1);
  app->add_option("--mode", o.mode, "Gradient oracle")->check(CLI::IsMember({"det", "stoch"}));
  app->add_option("--train", o.train, "Training data (LIBSVM format)");
  app->add_option("--test", o.test, "Test data (LIBSVM format)");
  app->add_option("--maxiter", o.maxiter, "Iteration budget (default: epochs/batch-frac in stoch mode, 100 in det)");
  app->add_option("--epochs", o.epochs, "Epochs for stochastic runs");
  app->add_option("--batch-frac", o.batch_frac, "Mini-batch fraction")->check(CLI::Range(1e-12, 1.0));
  app->add_option("--seeds", o.seeds, "Run seeds")->delimiter(',');
  app->add_option("--bounds", o.bounds, "Box bounds LO HI")->expected(2);
  app->add_option("--t-mu", o.t_mu, "Barrier decay exponent");
  app->add_option("--t-theta", o.t_theta, "Neighborhood decay exponent");
  app->add_option("--t-alpha", o.t_alpha, "Step-size decay exponent");
  app->add_option("--schedule", o.schedule)->check(CLI::IsMember({"power", "staircase"}));
  app->add_option("--param-mode", o.param_mode)->check(CLI::IsMember({"theory", "practical"}));
  app->add_option("--audit", o.audit)->check(CLI::IsMember({"off", "invariants", "full"}));
  app->add_option("--out", o.out, "Output file (default stdout)");
  app->add_option("--format", o.format)->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--dim", o.dim, "Quadratic dimension");
  app->add_option("--samples", o.samples, "Synthetic sample count when --train is absent");
  app->add_option("--features", o.features, "Synthetic feature count when --train is absent");
  app->add_option("--data-seed", o.data_seed, "Seed for generated data");
  app->add_option("--init-seed", o.init_seed, "Seed for x1 and the constant bootstrap");
  app->add_option("--alpha-buff", o.alpha_buff_base, "Theory-mode alpha buffer base");
  app->add_option("--gamma-buff", o.gamma_buff_base, "Theory-mode gamma buffer base");
  app->add_flag("--trace", o.trace, "Emit per-iteration trace rows");
  app->add_option("--cache", o.cache, "Constants cache file");
}

sipm::ExperimentSpec to_spec(const Options& o) {
  using namespace sipm;
  ExperimentSpec s;
  static const std::map<std::string, ModelKind> models{
      {"quadratic", ModelKind::quadratic}, {"logistic", ModelKind::logistic}, {"nn", ModelKind::nn}};
  static const std::map<std::string, SolverKind> solvers{
      {"sipm", SolverKind::sipm}, {"psgm", SolverKind::psgm}, {"proj-ipm", SolverKind::proj_ipm}};
  s.model = models.at(o.model);
  s.solvers.clear();
  for (const auto& name : o.solvers) s.solvers.push_back(solvers.at(name));
  s.mode = o.mode == "stoch" ? Setting::stochastic : Setting::deterministic;
  if (!o.train.empty()) s.train_path = o.train;
  if (!o.test.empty()) s.test_path = o.test;
  if (o.maxiter > 0) s.maxiter = o.maxiter;
  s.epochs = o.epochs;
  s.batch_fraction = o.batch_frac;
  s.seeds = o.seeds;
  s.lower = o.bounds[0];
  s.upper = o.bounds[1];
  s.exponents = {o.t_mu, o.t_theta, o.t_alpha};
  s.schedule = o.schedule == "power" ? ScheduleKind::power : ScheduleKind::staircase;
  s.param_mode = o.param_mode == "theory" ? ParamMode::theory : ParamMode::practical;
  s.audit = o.audit == "off"          ? AuditLevel::off
            : o.audit == "invariants" ? AuditLevel::invariants
                                      : AuditLevel::full_trace;
  s.quadratic_dim = o.dim;
  s.synthetic_samples = o.samples;
  s.synthetic_features = o.features;
  s.data_seed = o.data_seed;
  s.init_seed = o.init_seed;
  s.alpha_buff_base = o.alpha_buff_base;
  s.gamma_buff_base = o.gamma_buff_base;
  s.trace = o.trace;
  if (!o.cache.empty()) s.cache_path = o.cache;
  return s;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw sipm::Error(sipm::Errc::io_error, "cannot write " + o.out);
  f << text;
}

int run_report(const Options& o) {
  const auto report = sipm::run_experiment(to_spec(o));
  emit(o, o.format == "csv" ? sipm::render_csv(report) : sipm::render_json(report));
  for (const auto& r : report.runs) {
    if (!r.ok) {
      std::cerr << "failed: " << r.error << '\n';
    }
  }
  return 0;
}

int run_estimate(const Options& o) {
  using namespace sipm;
  ExperimentSpec spec = to_spec(o);
  const Problem p = build_problem(spec);
  const Vector x1 = initial_point(p.train->dimension(), spec.init_seed);
  BootstrapConfig boot;
  boot.seed = spec.init_seed;
  boot.batch_fraction = spec.batch_fraction;
  boot.mode = spec.mode;
  const EstimatedConstants c = estimate_constants(*p.train, x1, p.bounds, boot);
  Json j{{"dataset", p.dataset},
         {"model", o.model},
         {"dimension", p.train->dimension()},
         {"ell_f_bar", c.ell_f_bar},
         {"kappa_inf_bar", c.kappa_inf_bar},
         {"sigma_inf_bar", c.sigma_inf_bar}};
  emit(o, j.dump(2) + "\n");
  return 0;
}

int run_parse_check(const std::vector<std::string>& files) {
  for (const auto& path : files) {
    const sipm::SparseDataset d = sipm::read_libsvm_file(path);
    const auto labels = d.distinct_labels();
    std::cout << path << ": " << d.size() << " rows, " << d.n_features << " features, "
              << d.entries.size() << " nonzeros, labels {" << labels[0] << ", " << labels[1]
              << "}\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic interior-point solver for box-constrained problems"};
  app.require_subcommand(1);
  Options o;

  auto* solve = app.add_subcommand("solve", "Run one solver and emit a report");
  add_experiment_flags(solve, o, false);
  auto* bench = app.add_subcommand("bench", "Compare solvers over seeds");
  add_experiment_flags(bench, o, true);
  auto* estimate = app.add_subcommand("estimate", "Estimate problem constants");
  add_experiment_flags(estimate, o, false);
  auto* parse = app.add_subcommand("parse-check", "Validate LIBSVM files");
  std::vector<std::string> files;
  parse->add_option("files", files, "Files to check")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) {
      if (o.solvers.empty()) o.solvers = {"sipm"};
      return run_report(o);
    }
    if (*bench) {
      if (o.solvers.empty()) o.solvers = {"sipm", "psgm", "proj-ipm"};
      return run_report(o);
    }
    if (*estimate) return run_estimate(o);
    return run_parse_check(files);
  } catch (const sipm::Error& e) {
    std::cerr << "error: " << sipm::to_string(e.code()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
