#include "egaa/optimizers.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

namespace egaa {

namespace {

constexpr double kDivergenceNorm = 1e12;

Eigen::VectorXd residual_from_grad(const ProblemOracle& problem, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& grad, double beta) {
  if (problem.has_projector()) return problem.projector(x - beta * grad) - x;
  return -beta * grad;
}

double spectral_norm_sq(const Eigen::MatrixXd& R) {
  if (R.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
  return svd.singularValues()[0] * svd.singularValues()[0];
}

void advance(OptimizerState& state, Eigen::VectorXd x_next) {
  state.x_prev = std::move(state.x_k);
  state.grad_prev = state.grad_k;
  state.x_k = std::move(x_next);
  ++state.k;
}

enum class AaForm { raw, momentum, guarded };

StepDiagnostics aa_step_impl(OptimizerState& state, const ProblemOracle& problem,
                             const OptimizerConfig& cfg, AaForm form) {
  const double beta = cfg.step_beta;
  if (beta <= 0.0) throw std::invalid_argument("aa step: beta must be > 0");
  if (!state.grad_k.allFinite())
    throw std::runtime_error("aa step: non-finite gradient (divergence)");

  const Eigen::VectorXd r_k = residual_from_grad(problem, state.x_k, state.grad_k, beta);
  const Eigen::VectorXd y_next = state.x_k + r_k;
  state.history.push(state.x_k, r_k, y_next);

  auto [X, R] = state.history.difference_matrices();
  const int mk = static_cast<int>(R.cols());

  StepDiagnostics diag;
  if (mk == 0) {
    // First iteration: plain gradient step (the Algorithm's initialize line).
    diag.effective_mass_M = state.M_prev;
    diag.delta_M = 0.0;
    diag.guard_rho = 1.0;
    diag.consistency_sum = 0.0;
    diag.damping_c = 1.0 / std::sqrt(beta);
    diag.gain_delta = 1.0;
    advance(state, y_next);
    return diag;
  }

  const double lambda_abs =
      cfg.lambda_is_absolute ? cfg.lambda : cfg.lambda * spectral_norm_sq(R);
  const MixingCoefficients mix = solve_type2(r_k, R, lambda_abs);
  Eigen::VectorXd gamma = theta_to_gamma(mix.theta).gamma;

  const double M_raw = effective_mass(gamma);
  const double guard_threshold =
      cfg.scale_guard_by_sqrt_beta ? cfg.delta_max * std::sqrt(beta) : cfg.delta_max;

  diag.delta_M = M_raw - state.M_prev;
  double M_curr = M_raw;
  double rho = 1.0;

  if (form == AaForm::guarded) {
    rho = energy_guard(M_raw, state.M_prev, guard_threshold, cfg.mass_floor_eps);
    if (rho < 1.0) {
      gamma *= rho;
      M_curr = effective_mass(gamma);
    }
    if (M_curr < cfg.mass_floor_eps) {
      // Rescale so the realized mass sits on the floor; keeps the mass
      // identity valid for the coefficients actually applied. The target is
      // nudged a hair above eps so rounding cannot land below it.
      const double target = cfg.mass_floor_eps * (1.0 + 1e-9);
      const double denom = 2.0 * M_curr - 1.0;  // < 0 since M_curr < eps < 1/2
      gamma *= (2.0 * target - 1.0) / denom;
      M_curr = effective_mass(gamma);
    } else if (M_curr - state.M_prev > guard_threshold) {
      // The single-pass scaling overshoots when M_prev < 1/2; clamp exactly.
      const double target = state.M_prev + guard_threshold;
      const double denom = 2.0 * M_curr - 1.0;
      if (target >= 0.5 && denom > 0.0) {
        gamma *= (2.0 * target - 1.0) / denom;
        M_curr = effective_mass(gamma);
      } else {
        gamma.setZero();
        M_curr = 0.5;
      }
    }
  }
  state.M_prev = M_curr;

  diag.effective_mass_M = M_curr;
  diag.guard_rho = rho;
  auto [consistency, damping] = consistency_deviation(gamma, beta);
  diag.consistency_sum = consistency;
  diag.damping_c = damping;
  const double gnorm = state.grad_k.norm();
  diag.gain_delta = gnorm > 0.0 ? gain_factor(state.grad_k, R, lambda_abs) : 1.0;

  Eigen::VectorXd x_next;
  if (form == AaForm::raw) {
    x_next = state.x_k + r_k - (X + R) * mix.theta;
  } else {
    x_next = y_next;
    for (int j = 1; j <= mk; ++j)
      x_next += gamma[j - 1] * (y_next - state.history.lagged_y(j));
    if (form == AaForm::guarded && cfg.eta > 0.0 && state.k >= 1)
      x_next -= cfg.eta * beta * (state.grad_k - state.grad_prev);
  }
  if (problem.has_projector()) x_next = problem.projector(x_next);

  advance(state, std::move(x_next));
  return diag;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::gd: return "gd";
    case Method::nag: return "nag";
    case Method::aa2: return "aa2";
    case Method::aa_momentum: return "aa_momentum";
    case Method::egaa: return "egaa";
  }
  throw std::logic_error("method_name: bad enum");
}

Method method_from_name(const std::string& name) {
  if (name == "gd") return Method::gd;
  if (name == "nag") return Method::nag;
  if (name == "aa2") return Method::aa2;
  if (name == "aa_momentum") return Method::aa_momentum;
  if (name == "egaa") return Method::egaa;
  throw std::invalid_argument("method_from_name: unknown method '" + name + "'");
}

void gd_step(OptimizerState& state, const ProblemOracle& problem, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("gd_step: beta must be > 0");
  if (!state.grad_k.allFinite())
    throw std::runtime_error("gd_step: non-finite gradient (divergence)");
  Eigen::VectorXd x_next = state.x_k - beta * state.grad_k;
  if (problem.has_projector()) x_next = problem.projector(x_next);
  advance(state, std::move(x_next));
}

void nag_step(OptimizerState& state, const ProblemOracle& problem, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("nag_step: beta must be > 0");
  const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * state.nag_t * state.nag_t));
  const double momentum = (state.nag_t - 1.0) / t_next;
  const Eigen::VectorXd& anchor = state.k == 0 ? state.x_k : state.x_prev;
  Eigen::VectorXd y = state.x_k + momentum * (state.x_k - anchor);
  Eigen::VectorXd gy = problem.gradient(y);
  if (!gy.allFinite()) throw std::runtime_error("nag_step: non-finite gradient (divergence)");
  Eigen::VectorXd x_next = y - beta * gy;
  if (problem.has_projector()) x_next = problem.projector(x_next);
  state.nag_t = t_next;
  advance(state, std::move(x_next));
}

StepDiagnostics aa2_step(OptimizerState& state, const ProblemOracle& problem, double beta,
                         double lambda, bool lambda_is_absolute) {
  OptimizerConfig cfg;
  cfg.step_beta = beta;
  cfg.lambda = lambda;
  cfg.lambda_is_absolute = lambda_is_absolute;
  return aa_step_impl(state, problem, cfg, AaForm::raw);
}

StepDiagnostics aa_momentum_step(OptimizerState& state, const ProblemOracle& problem,
                                 double beta, double lambda, bool lambda_is_absolute) {
  OptimizerConfig cfg;
  cfg.step_beta = beta;
  cfg.lambda = lambda;
  cfg.lambda_is_absolute = lambda_is_absolute;
  return aa_step_impl(state, problem, cfg, AaForm::momentum);
}

double energy_guard(double M_curr, double M_prev, double delta_max,
                    double /*mass_floor_eps*/) {
  if (delta_max <= 0.0) throw std::invalid_argument("energy_guard: delta_max must be > 0");
  const double dM = M_curr - M_prev;
  if (dM > delta_max) return delta_max / dM;       // clamp explosive mass growth
  if (M_curr < 0.0) return -1.0 / (2.0 * M_curr - 1.0);  // enforce positive mass
  return 1.0;
}

StepDiagnostics egaa_step(OptimizerState& state, const ProblemOracle& problem,
                          const OptimizerConfig& config) {
  return aa_step_impl(state, problem, config, AaForm::guarded);
}

RunResult run(const ProblemOracle& problem, const OptimizerConfig& config,
              const Eigen::VectorXd& x0, bool keep_iterates) {
  if (x0.size() != problem.dimension())
    throw std::invalid_argument("run: x0 dimension mismatch");
  if (!x0.allFinite()) throw std::invalid_argument("run: x0 must be finite");
  if (config.max_iters < 0) throw std::invalid_argument("run: max_iters must be >= 0");

  const double beta = config.step_beta;
  const bool aa_family = config.method == Method::aa2 ||
                         config.method == Method::aa_momentum ||
                         config.method == Method::egaa;

  RunResult result;
  result.records.reserve(static_cast<std::size_t>(config.max_iters));
  OptimizerState state(x0, config.depth_m);
  state.grad_k = problem.gradient(x0);
  if (keep_iterates) result.iterates.push_back(x0);
  result.final_x = x0;

  const bool tol_active = std::isfinite(config.grad_tol);
  double pg_prev = residual_from_grad(problem, x0, state.grad_k, beta).norm() / beta;
  if (tol_active && state.grad_k.allFinite() && pg_prev <= config.grad_tol) {
    result.status = RunStatus::converged;
    return result;
  }

  result.status = RunStatus::max_iters_reached;
  for (long k = 1; k <= config.max_iters; ++k) {
    std::optional<StepDiagnostics> diag;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      switch (config.method) {
        case Method::gd: gd_step(state, problem, beta); break;
        case Method::nag: nag_step(state, problem, beta); break;
        case Method::aa2:
          diag = aa2_step(state, problem, beta, config.lambda, config.lambda_is_absolute);
          break;
        case Method::aa_momentum:
          diag = aa_momentum_step(state, problem, beta, config.lambda,
                                  config.lambda_is_absolute);
          break;
        case Method::egaa: diag = egaa_step(state, problem, config); break;
      }
    } catch (const std::runtime_error&) {  // non-finite state inside a step
      result.status = RunStatus::diverged;
      break;
    }
    const auto t1 = std::chrono::steady_clock::now();

    auto [f, g] = problem.value_and_gradient(state.x_k);
    state.grad_k = std::move(g);
    const bool finite = std::isfinite(f) && state.grad_k.allFinite() &&
                        state.x_k.allFinite() && state.x_k.norm() <= kDivergenceNorm;
    const double pg =
        finite ? residual_from_grad(problem, state.x_k, state.grad_k, beta).norm() / beta
               : std::numeric_limits<double>::quiet_NaN();

    if (diag) diag->realized_contraction = pg / pg_prev;

    IterationRecord rec;
    rec.k = k;
    rec.f_value = f;
    rec.grad_norm = pg;
    rec.diagnostics = aa_family ? diag : std::nullopt;
    rec.wall_nanos =
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
    result.records.push_back(std::move(rec));
    if (keep_iterates) result.iterates.push_back(state.x_k);

    if (!finite) {
      result.status = RunStatus::diverged;
      break;
    }
    result.final_x = state.x_k;
    pg_prev = pg;
    if (tol_active && pg <= config.grad_tol) {
      result.status = RunStatus::converged;
      break;
    }
  }
  return result;
}

std::vector<bool> stability_check(const std::vector<IterationRecord>& trace,
                                  const OptimizerConfig& config) {
  const double sqrt_h = std::sqrt(config.step_beta);
  std::vector<bool> flags;
  if (trace.size() < 2) return flags;
  flags.reserve(trace.size() - 1);
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    const auto& a = trace[i].diagnostics;
    const auto& b = trace[i + 1].diagnostics;
    if (!a || !b) {
      flags.push_back(false);
      continue;
    }
    const double required = (b->effective_mass_M - a->effective_mass_M) / (2.0 * sqrt_h);
    flags.push_back(a->damping_c < required - 1e-12);
  }
  return flags;
}

double stability_violation_fraction(const std::vector<IterationRecord>& trace,
                                    const OptimizerConfig& config) {
  const auto flags = stability_check(trace, config);
  if (flags.empty()) return 0.0;
  std::size_t count = 0;
  for (bool f : flags) count += f ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(flags.size());
}

}  // namespace egaa
