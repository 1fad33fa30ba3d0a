#include "egaa/bench.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "egaa/csv.hpp"
#include "egaa/ode.hpp"
#include "egaa/rng.hpp"

namespace fs = std::filesystem;

namespace egaa {

namespace {

std::string x0_policy_name(X0Policy p) {
  switch (p) {
    case X0Policy::origin: return "origin";
    case X0Policy::standard_normal: return "standard_normal";
    case X0Policy::explicit_vector: return "explicit";
  }
  throw std::logic_error("x0_policy_name: bad enum");
}

X0Policy x0_policy_from_name(const std::string& s) {
  if (s == "origin") return X0Policy::origin;
  if (s == "standard_normal") return X0Policy::standard_normal;
  if (s == "explicit") return X0Policy::explicit_vector;
  throw std::invalid_argument("unknown x0 policy '" + s + "'");
}

MethodSpec make_method(const std::string& name, Method method, double beta, int m,
                       double delta_max, double eta, long max_iters, double grad_tol) {
  MethodSpec ms;
  ms.name = name;
  ms.config.method = method;
  ms.config.step_beta = beta;
  ms.config.depth_m = m;
  ms.config.delta_max = delta_max;
  ms.config.eta = eta;
  ms.config.max_iters = max_iters;
  ms.config.grad_tol = grad_tol;
  return ms;
}

}  // namespace

std::string experiment_family(const ExperimentSpec& spec) {
  const auto pos = spec.name.find('_');
  return pos == std::string::npos ? spec.name : spec.name.substr(0, pos);
}

std::vector<ExperimentSpec> builtin_experiments() {
  std::vector<ExperimentSpec> out;

  // Rosenbrock valley, three curvature levels. The stiff a = 100 case uses
  // the aggressive 1e-5 step for the Anderson methods and 1e-3 for Nesterov;
  // the milder cases run every method at 5e-4 (1e-3 puts the damped guarded
  // update past its stability limit on the a = 20 valley).
  for (double a : {1.0, 20.0, 100.0}) {
    ExperimentSpec e;
    e.name = "rosenbrock_a" + std::to_string(static_cast<int>(a));
    e.problem = RosenbrockSpec{a};
    e.x0_policy = X0Policy::explicit_vector;
    e.x0_explicit = {-1.5, 1.5};
    e.max_iters = 20000;
    e.grad_tol = 1e-6;
    e.output_dir = "out";
    const double beta_aa = a == 100.0 ? 1e-5 : 5e-4;
    const double beta_nag = a == 100.0 ? 1e-3 : 5e-4;
    e.methods = {
        make_method("nag", Method::nag, beta_nag, 2, 2.0, 0.0, e.max_iters, e.grad_tol),
        make_method("aa2", Method::aa2, beta_aa, 2, 2.0, 0.0, e.max_iters, e.grad_tol),
        make_method("egaa", Method::egaa, beta_aa, 2, 50.0, 0.05, e.max_iters, e.grad_tol),
    };
    out.push_back(std::move(e));
  }

  // Logistic recovery sweep: with the guard threshold pushed to 1e12 and
  // negligible damping, EG-AA must track raw AA; smaller thresholds blend
  // toward gradient descent. Depth 1 keeps the raw masses positive so the
  // guard branches stay inactive in the reference pair.
  {
    const LogisticSpec lspec{};
    const ProblemOracle logistic = make_problem(lspec);
    const double beta = 1.0 / logistic.metadata().lipschitz_L.value();
    ExperimentSpec e;
    e.name = "logistic_recovery";
    e.problem = lspec;
    e.x0_policy = X0Policy::origin;
    e.max_iters = 200;
    e.grad_tol = 0.0;
    e.output_dir = "out";
    e.methods = {
        make_method("gd", Method::gd, beta, 1, 2.0, 0.0, e.max_iters, e.grad_tol),
        make_method("aa2", Method::aa2, beta, 1, 2.0, 0.0, e.max_iters, e.grad_tol),
        make_method("egaa_dmax1e12", Method::egaa, beta, 1, 1e12, 1e-12, e.max_iters,
                    e.grad_tol),
        make_method("egaa_dmax1e2", Method::egaa, beta, 1, 1e2, 1e-12, e.max_iters,
                    e.grad_tol),
        make_method("egaa_dmax1", Method::egaa, beta, 1, 1.0, 1e-12, e.max_iters,
                    e.grad_tol),
        make_method("egaa_dmax0p5", Method::egaa, beta, 1, 0.5, 1e-12, e.max_iters,
                    e.grad_tol),
    };
    out.push_back(std::move(e));
  }

  // Ill-conditioned non-negative least squares at three regularization levels,
  // fixed 5000 iterations from the origin.
  for (double mu : {5e-4, 5e-5, 5e-6}) {
    NnlsSpec nspec;
    nspec.regularization_mu = mu;
    nspec.seed = 11;
    const double L = nspec.singular_high * nspec.singular_high + 2.0 * mu;
    const double beta = 1.0 / L;

    ExperimentSpec e;
    std::string tag = mu == 5e-4 ? "mu5em4" : (mu == 5e-5 ? "mu5em5" : "mu5em6");
    e.name = "nnls_" + tag;
    e.problem = nspec;
    e.x0_policy = X0Policy::origin;
    e.max_iters = 5000;
    e.grad_tol = 0.0;
    e.output_dir = "out";
    e.methods = {
        make_method("nag", Method::nag, beta, 3, 2.0, 0.0, e.max_iters, e.grad_tol),
        make_method("aa2", Method::aa2, beta, 3, 2.0, 0.0, e.max_iters, e.grad_tol),
        make_method("egaa", Method::egaa, beta, 3, 20.0, 0.02, e.max_iters, e.grad_tol),
    };
    out.push_back(std::move(e));
  }

  // Quadratic grid over condition numbers. Baselines run at the conservative
  // 1/L, the Anderson methods at the aggressive 1.8/L.
  for (double kappa : {50.0, 500.0, 5000.0, 50000.0}) {
    ExperimentSpec e;
    e.name = "quadratic_k" + std::to_string(static_cast<long>(kappa));
    e.problem = QuadraticSpec{100, kappa, "uniform"};
    e.x0_policy = X0Policy::standard_normal;
    e.x0_seed = 1;
    e.max_iters = 5000;
    e.grad_tol = 1e-6;
    e.output_dir = "out";
    const double safe = 1.0 / kappa;
    const double aggressive = 1.8 / kappa;
    e.methods = {
        make_method("gd", Method::gd, safe, 3, 2.0, 0.0, e.max_iters, e.grad_tol),
        make_method("nag", Method::nag, safe, 3, 2.0, 0.0, e.max_iters, e.grad_tol),
        make_method("aa2", Method::aa2, aggressive, 3, 2.0, 0.0, e.max_iters, e.grad_tol),
        make_method("egaa", Method::egaa, aggressive, 3, 5.0, 0.1, e.max_iters,
                    e.grad_tol),
    };
    out.push_back(std::move(e));
  }

  return out;
}

nlohmann::ordered_json optimizer_config_to_json(const OptimizerConfig& cfg) {
  nlohmann::ordered_json j;
  j["method"] = method_name(cfg.method);
  j["step_beta"] = cfg.step_beta;
  j["depth_m"] = cfg.depth_m;
  j["lambda"] = cfg.lambda;
  j["lambda_is_absolute"] = cfg.lambda_is_absolute;
  j["delta_max"] = cfg.delta_max;
  j["eta"] = cfg.eta;
  j["mass_floor_eps"] = cfg.mass_floor_eps;
  j["max_iters"] = cfg.max_iters;
  j["grad_tol"] = cfg.grad_tol;
  j["scale_guard_by_sqrt_beta"] = cfg.scale_guard_by_sqrt_beta;
  return j;
}

OptimizerConfig optimizer_config_from_json(const nlohmann::json& j) {
  OptimizerConfig cfg;
  cfg.method = method_from_name(j.at("method").get<std::string>());
  cfg.step_beta = j.at("step_beta").get<double>();
  cfg.depth_m = j.value("depth_m", cfg.depth_m);
  cfg.lambda = j.value("lambda", cfg.lambda);
  cfg.lambda_is_absolute = j.value("lambda_is_absolute", cfg.lambda_is_absolute);
  cfg.delta_max = j.value("delta_max", cfg.delta_max);
  cfg.eta = j.value("eta", cfg.eta);
  cfg.mass_floor_eps = j.value("mass_floor_eps", cfg.mass_floor_eps);
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.grad_tol = j.value("grad_tol", cfg.grad_tol);
  cfg.scale_guard_by_sqrt_beta =
      j.value("scale_guard_by_sqrt_beta", cfg.scale_guard_by_sqrt_beta);
  return cfg;
}

nlohmann::ordered_json experiment_spec_to_json(const ExperimentSpec& spec) {
  nlohmann::ordered_json j;
  j["name"] = spec.name;
  j["problem"] = problem_spec_to_json(spec.problem);
  nlohmann::ordered_json methods = nlohmann::ordered_json::array();
  for (const auto& m : spec.methods) {
    nlohmann::ordered_json mj;
    mj["name"] = m.name;
    mj["config"] = optimizer_config_to_json(m.config);
    methods.push_back(std::move(mj));
  }
  j["methods"] = std::move(methods);
  j["x0_policy"] = x0_policy_name(spec.x0_policy);
  j["x0_seed"] = spec.x0_seed;
  if (spec.x0_policy == X0Policy::explicit_vector) j["x0_explicit"] = spec.x0_explicit;
  j["max_iters"] = spec.max_iters;
  j["grad_tol"] = spec.grad_tol;
  j["output_dir"] = spec.output_dir;
  return j;
}

ExperimentSpec experiment_spec_from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  spec.name = j.at("name").get<std::string>();
  spec.problem = problem_spec_from_json(j.at("problem"));
  for (const auto& mj : j.at("methods")) {
    MethodSpec m;
    m.config = optimizer_config_from_json(mj.at("config"));
    m.name = mj.value("name", method_name(m.config.method));
    spec.methods.push_back(std::move(m));
  }
  spec.x0_policy = x0_policy_from_name(j.value("x0_policy", std::string("origin")));
  spec.x0_seed = j.value("x0_seed", std::uint64_t{0});
  if (j.contains("x0_explicit"))
    spec.x0_explicit = j.at("x0_explicit").get<std::vector<double>>();
  spec.max_iters = j.at("max_iters").get<long>();
  spec.grad_tol = j.at("grad_tol").get<double>();
  spec.output_dir = j.value("output_dir", std::string("out"));
  return spec;
}

Eigen::VectorXd resolve_x0(const ExperimentSpec& spec, int dimension,
                           std::optional<std::uint64_t> seed_override) {
  switch (spec.x0_policy) {
    case X0Policy::origin:
      return Eigen::VectorXd::Zero(dimension);
    case X0Policy::standard_normal: {
      Rng rng(seed_override.value_or(spec.x0_seed));
      return rng.normal_vector(dimension);
    }
    case X0Policy::explicit_vector: {
      if (static_cast<int>(spec.x0_explicit.size()) != dimension)
        throw std::invalid_argument("resolve_x0: explicit x0 has wrong dimension");
      return Eigen::Map<const Eigen::VectorXd>(spec.x0_explicit.data(), dimension);
    }
  }
  throw std::logic_error("resolve_x0: bad policy");
}

std::vector<SummaryRecord> run_experiment(const ExperimentSpec& spec, bool save_iterates,
                                          std::optional<std::uint64_t> seed_override) {
  const ProblemSpec pspec =
      seed_override ? with_seed(spec.problem, *seed_override) : spec.problem;
  const ProblemOracle problem = make_problem(pspec);
  const Eigen::VectorXd x0 = resolve_x0(spec, problem.dimension(), seed_override);

  std::error_code ec;
  fs::create_directories(spec.output_dir, ec);
  if (!fs::is_directory(spec.output_dir))
    throw std::runtime_error("run_experiment: cannot create output dir '" +
                             spec.output_dir + "'");

  struct Job {
    MethodSpec method;
    std::future<RunResult> future;
  };
  std::vector<Job> jobs;
  for (const auto& m : spec.methods) {
    OptimizerConfig cfg = m.config;
    cfg.max_iters = spec.max_iters;
    cfg.grad_tol = spec.grad_tol;
    jobs.push_back({m, std::async(std::launch::async, [&problem, cfg, &x0,
                                                       save_iterates] {
                      return run(problem, cfg, x0, save_iterates);
                    })});
  }

  std::vector<SummaryRecord> summaries;
  for (auto& job : jobs) {
    RunResult rr = job.future.get();
    const std::string stem =
        (fs::path(spec.output_dir) / (spec.name + "__" + job.method.name)).string();
    write_trace_csv(stem + ".csv", rr.records);
    if (save_iterates && !rr.iterates.empty())
      write_iterates_csv(stem + ".iterates.csv", rr.iterates);

    SummaryRecord s;
    s.method = job.method.name;
    s.iters_to_tol =
        rr.status == RunStatus::converged ? static_cast<long>(rr.records.size()) : -1;
    if (!rr.records.empty()) {
      s.final_grad_norm = rr.records.back().grad_norm;
      s.final_f = rr.records.back().f_value;
    } else {
      auto [f0, g0] = problem.value_and_gradient(x0);
      s.final_f = f0;
      s.final_grad_norm = residual(problem, x0, job.method.config.step_beta).norm() /
                          job.method.config.step_beta;
    }
    long fired = 0, with_diag = 0;
    for (const auto& rec : rr.records)
      if (rec.diagnostics) {
        ++with_diag;
        if (rec.diagnostics->guard_rho < 1.0) ++fired;
      }
    s.guard_fire_fraction = with_diag > 0 ? static_cast<double>(fired) / with_diag : 0.0;
    OptimizerConfig cfg = job.method.config;
    s.stability_violation_fraction = stability_violation_fraction(rr.records, cfg);
    s.status = rr.status == RunStatus::converged
                   ? "converged"
                   : (rr.status == RunStatus::diverged ? "diverged" : "max_iters");
    summaries.push_back(std::move(s));
  }

  nlohmann::ordered_json j;
  j["experiment"] = spec.name;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& s : summaries) {
    nlohmann::ordered_json r;
    r["method"] = s.method;
    r["iters_to_tol"] = s.iters_to_tol;
    r["final_grad_norm"] = s.final_grad_norm;
    r["final_f"] = s.final_f;
    r["guard_fire_fraction"] = s.guard_fire_fraction;
    r["stability_violation_fraction"] = s.stability_violation_fraction;
    r["status"] = s.status;
    rows.push_back(std::move(r));
  }
  j["summary"] = std::move(rows);
  std::ofstream os((fs::path(spec.output_dir) / (spec.name + "__summary.json")).string(),
                   std::ios::binary);
  os << j.dump(2) << '\n';

  return summaries;
}

// --- CLI ----------------------------------------------------------------------

namespace {

struct OdeCliConfig {
  ProblemSpec problem = QuadraticSpec{2, 10.0, "uniform"};
  std::vector<double> x0;
  std::vector<double> v0;
  double t0 = 0.1;
  double T = 10.0;
  double dt = 1e-3;
  double mass_const = 1.0, mass_slope = 0.0;
  double damping_const = 0.0, damping_over_t = 3.0;
  double beta_const = 1.0;
  double sqrt_h = 0.0;
  double mass_floor = 1e-3;
};

OdeCliConfig parse_ode_config(const std::string& path) {
  OdeCliConfig c;
  if (path.empty()) return c;
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  const nlohmann::json j = nlohmann::json::parse(is);
  if (j.contains("problem")) c.problem = problem_spec_from_json(j.at("problem"));
  if (j.contains("x0")) c.x0 = j.at("x0").get<std::vector<double>>();
  if (j.contains("v0")) c.v0 = j.at("v0").get<std::vector<double>>();
  c.t0 = j.value("t0", c.t0);
  c.T = j.value("T", c.T);
  c.dt = j.value("dt", c.dt);
  if (j.contains("schedules")) {
    const auto& s = j.at("schedules");
    c.mass_const = s.value("mass_const", c.mass_const);
    c.mass_slope = s.value("mass_slope", c.mass_slope);
    c.damping_const = s.value("damping_const", c.damping_const);
    c.damping_over_t = s.value("damping_over_t", c.damping_over_t);
    c.beta_const = s.value("beta_const", c.beta_const);
    c.sqrt_h = s.value("sqrt_h", c.sqrt_h);
    c.mass_floor = s.value("mass_floor", c.mass_floor);
  }
  return c;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed, bool save_iterates) {
  std::ifstream is(config_path);
  if (!is) {
    std::cerr << "error: cannot open config: " << config_path << "\n";
    return 2;
  }
  ExperimentSpec spec = experiment_spec_from_json(nlohmann::json::parse(is));
  if (!out_dir.empty()) spec.output_dir = out_dir;
  const auto summaries = run_experiment(spec, save_iterates, seed);
  bool any_diverged = false;
  for (const auto& s : summaries) {
    std::cout << spec.name << " " << s.method << ": status=" << s.status
              << " final_grad_norm=" << format_double(s.final_grad_norm) << "\n";
    any_diverged |= s.status == "diverged";
  }
  return any_diverged ? 1 : 0;
}

int cmd_bench(const std::string& family, const std::string& out_dir,
              std::optional<std::uint64_t> seed, bool save_iterates) {
  bool matched = false;
  bool any_diverged = false;
  for (ExperimentSpec spec : builtin_experiments()) {
    if (family != "all" && experiment_family(spec) != family) continue;
    matched = true;
    spec.output_dir = out_dir;
    const auto summaries = run_experiment(spec, save_iterates, seed);
    for (const auto& s : summaries) {
      std::cout << spec.name << " " << s.method << ": status=" << s.status
                << " iters_to_tol=" << s.iters_to_tol
                << " final_grad_norm=" << format_double(s.final_grad_norm) << "\n";
      any_diverged |= s.status == "diverged";
    }
  }
  if (!matched) {
    std::cerr << "error: unknown family '" << family
              << "' (expect rosenbrock, logistic, nnls, quadratic or all)\n";
    return 2;
  }
  return any_diverged ? 1 : 0;
}

int cmd_ode(const std::string& kind, const std::string& config_path,
            const std::string& out_dir) {
  const OdeCliConfig c = parse_ode_config(config_path);
  const ProblemOracle problem = make_problem(c.problem);
  const int n = problem.dimension();

  Eigen::VectorXd x0 = Eigen::VectorXd::Ones(n);
  if (!c.x0.empty())
    x0 = Eigen::Map<const Eigen::VectorXd>(c.x0.data(), c.x0.size());
  Eigen::VectorXd v0 = Eigen::VectorXd::Zero(n);
  if (!c.v0.empty())
    v0 = Eigen::Map<const Eigen::VectorXd>(c.v0.data(), c.v0.size());
  if (x0.size() != n || v0.size() != n) {
    std::cerr << "error: x0/v0 dimension does not match the problem\n";
    return 2;
  }

  Schedules sched;
  sched.mass_M = [c](double t) { return c.mass_const + c.mass_slope * t; };
  sched.damping_c = [c](double t) {
    return c.damping_const + (c.damping_over_t != 0.0 ? c.damping_over_t / t : 0.0);
  };
  sched.geom_beta = [c](double) { return c.beta_const; };
  sched.sqrt_h = kind == "ishd" ? (c.sqrt_h != 0.0 ? c.sqrt_h : 0.1) : c.sqrt_h;
  sched.mass_floor = c.mass_floor;

  std::vector<OdeState> traj;
  if (kind == "avd") {
    traj = integrate_avd(problem, x0, c.t0, c.T, c.dt);
  } else if (kind == "vm") {
    traj = integrate_variable_mass(problem, sched, x0, v0, c.t0, c.T, c.dt);
  } else if (kind == "ishd") {
    traj = integrate_ishd(problem, sched, x0, v0, c.t0, c.T, c.dt);
  } else {
    std::cerr << "error: --kind must be avd, vm or ishd\n";
    return 2;
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const std::string path = (fs::path(out_dir) / ("ode_" + kind + ".csv")).string();
  write_trajectory_csv(path, traj);
  std::cout << "wrote " << path << " (" << traj.size() << " nodes)\n";
  return 0;
}

int cmd_compare(const std::string& trace_path, double h, std::string iterates_path,
                const std::string& problem_path, const std::string& out_dir) {
  if (h <= 0.0) {
    std::cerr << "error: --h must be > 0\n";
    return 2;
  }
  if (problem_path.empty()) {
    // A bare trace CSV cannot reconstruct the objective behind the run.
    std::cerr << "error: compare requires --problem <json> naming the objective\n";
    return 2;
  }
  if (iterates_path.empty()) {
    iterates_path = trace_path;
    const auto pos = iterates_path.rfind(".csv");
    if (pos != std::string::npos) iterates_path.replace(pos, 4, ".iterates.csv");
  }

  std::ifstream is(problem_path);
  if (!is) {
    std::cerr << "error: cannot open problem spec: " << problem_path << "\n";
    return 2;
  }
  const ProblemOracle problem =
      make_problem(problem_spec_from_json(nlohmann::json::parse(is)));

  const auto records = read_trace_csv(trace_path);
  const auto iterates = read_iterates_csv(iterates_path);
  if (records.empty() || iterates.size() < 2) {
    std::cerr << "error: trace or iterates file too short\n";
    return 2;
  }

  const Schedules sched = schedules_from_trace(records, h);
  const double sqrt_h = std::sqrt(h);
  const std::size_t K = iterates.size() - 1;
  const auto traj = integrate_variable_mass(problem, sched, iterates.front(),
                                            Eigen::VectorXd::Zero(iterates.front().size()),
                                            sqrt_h, K * sqrt_h, sqrt_h / 20.0);
  const double dev = discrete_vs_ode_deviation(iterates, traj, h);
  std::cout << "sup_deviation " << format_double(dev) << "\n";

  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    const std::string path = (fs::path(out_dir) / "compare_trajectory.csv").string();
    write_trajectory_csv(path, traj);
    std::cout << "wrote " << path << "\n";
  }
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Anderson acceleration as adaptive momentum: optimizers, ODE limits, "
               "benchmark harness"};
  app.require_subcommand(1);

  std::string cfg_path, family = "all", kind, trace_path, iterates_path, problem_path;
  std::string out_run, out_bench = "out", out_ode = "out", out_cmp;
  double h = 0.0;
  std::optional<std::uint64_t> seed;
  std::uint64_t seed_raw = 0;
  bool save_iterates = false;

  auto* sub_run = app.add_subcommand("run", "run a single experiment from a JSON spec");
  sub_run->add_option("--config", cfg_path, "experiment spec (JSON)")->required();
  sub_run->add_option("--out", out_run, "output directory override");
  auto* run_seed = sub_run->add_option("--seed", seed_raw, "override spec seeds");
  sub_run->add_flag("--save-iterates", save_iterates, "also write iterate CSVs");

  auto* sub_bench = app.add_subcommand("bench", "run built-in experiment families");
  sub_bench->add_option("--family", family, "rosenbrock|logistic|nnls|quadratic|all");
  sub_bench->add_option("--out", out_bench, "output directory");
  auto* bench_seed = sub_bench->add_option("--seed", seed_raw, "override spec seeds");
  sub_bench->add_flag("--save-iterates", save_iterates, "also write iterate CSVs");

  auto* sub_ode = app.add_subcommand("ode", "integrate a continuous-time limit");
  sub_ode->add_option("--kind", kind, "avd|vm|ishd")->required();
  sub_ode->add_option("--config", cfg_path, "integration config (JSON)");
  sub_ode->add_option("--out", out_ode, "output directory");

  auto* sub_cmp = app.add_subcommand("compare", "discrete trace vs its ODE limit");
  sub_cmp->set_help_flag("--help", "print help");  // frees -h for the --h option
  sub_cmp->add_option("--trace", trace_path, "trace CSV")->required();
  sub_cmp->add_option("--h", h, "step size identification h")->required();
  sub_cmp->add_option("--iterates", iterates_path,
                      "iterates CSV (default: <trace>.iterates.csv)");
  sub_cmp->add_option("--problem", problem_path, "problem spec (JSON)");
  sub_cmp->add_option("--out", out_cmp, "output directory for the ODE trajectory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run_seed->count() > 0 || bench_seed->count() > 0) seed = seed_raw;
    if (sub_run->parsed()) return cmd_run(cfg_path, out_run, seed, save_iterates);
    if (sub_bench->parsed()) return cmd_bench(family, out_bench, seed, save_iterates);
    if (sub_ode->parsed()) return cmd_ode(kind, cfg_path, out_ode);
    if (sub_cmp->parsed())
      return cmd_compare(trace_path, h, iterates_path, problem_path, out_cmp);
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";  // includes byte position
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace egaa
