#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "egaa/history.hpp"
#include "egaa/mixing.hpp"
#include "egaa/problems.hpp"

namespace egaa {

enum class Method { gd, nag, aa2, aa_momentum, egaa };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct OptimizerConfig {
  Method method = Method::gd;
  double step_beta = 0.1;
  int depth_m = 3;
  /// Tikhonov weight for the residual least squares. Interpreted relative to
  /// ||R^T R||_2 unless lambda_is_absolute is set.
  double lambda = 1e-10;
  bool lambda_is_absolute = false;
  double delta_max = 2.0;
  double eta = 0.0;
  double mass_floor_eps = 1e-3;
  long max_iters = 1000;
  /// Stop once the projected-gradient norm falls to this value. A non-finite
  /// tolerance disables the check and the run executes max_iters steps.
  double grad_tol = 1e-8;
  /// Compare mass growth against delta_max * sqrt(beta) instead of delta_max.
  bool scale_guard_by_sqrt_beta = false;

  bool operator==(const OptimizerConfig&) const = default;
};

/// Mutable per-run state. Every step function expects grad_k to hold the
/// gradient at x_k on entry (the runner refreshes it after each step) and
/// shifts x/grad into the _prev slots on exit.
struct OptimizerState {
  Eigen::VectorXd x_k, x_prev, grad_k, grad_prev;
  HistoryBuffer history;
  double M_prev = 1.0;
  double nag_t = 1.0;  // t_{k-1} of the Nesterov schedule, t_0 = 1
  long k = 0;

  OptimizerState(Eigen::VectorXd x0, int depth_m)
      : x_k(std::move(x0)), history(depth_m) {}
};

struct IterationRecord {
  long k = 0;
  double f_value = 0.0;
  double grad_norm = 0.0;  // projected-gradient norm ||r_k|| / beta
  std::optional<StepDiagnostics> diagnostics;
  std::int64_t wall_nanos = 0;
};

enum class RunStatus { converged, max_iters_reached, diverged };

struct RunResult {
  std::vector<IterationRecord> records;
  RunStatus status = RunStatus::max_iters_reached;
  Eigen::VectorXd final_x;                 // last finite iterate
  std::vector<Eigen::VectorXd> iterates;   // x_0, x_1, ... when requested
};

/// Plain projected gradient step x <- projector(x - beta grad f(x)).
/// Expects state.grad_k to hold the gradient at state.x_k.
void gd_step(OptimizerState& state, const ProblemOracle& problem, double beta);

/// Nesterov step with the t_k schedule; the first step reduces to gd_step.
void nag_step(OptimizerState& state, const ProblemOracle& problem, double beta);

/// Raw Type-II Anderson update x_{k+1} = x_k + r_k - (X_k + R_k) theta.
StepDiagnostics aa2_step(OptimizerState& state, const ProblemOracle& problem, double beta,
                         double lambda, bool lambda_is_absolute = false);

/// The same update computed in the momentum basis,
/// x_{k+1} = y_{k+1} + sum_j gamma^(j) (y_{k+1} - y_{k-j+1}).
StepDiagnostics aa_momentum_step(OptimizerState& state, const ProblemOracle& problem,
                                 double beta, double lambda,
                                 bool lambda_is_absolute = false);

/// Inertial governor scaling. Growth clamp first (rho = delta_max / dM), then
/// the positive-mass branch (rho = -1 / (2 M_curr - 1)); returns 1 when
/// neither fires. The caller rescales gamma and applies the mass floor.
double energy_guard(double M_curr, double M_prev, double delta_max, double mass_floor_eps);

/// Energy-guarded Anderson step: momentum update with guarded coefficients
/// plus the gradient-difference damping D_k = -eta * beta * (g_k - g_{k-1}).
StepDiagnostics egaa_step(OptimizerState& state, const ProblemOracle& problem,
                          const OptimizerConfig& config);

/// Full optimization run. Deterministic given the problem instance, config
/// and x0. Divergence (non-finite values or ||x|| > 1e12) terminates the run
/// with status diverged and the partial trace retained.
RunResult run(const ProblemOracle& problem, const OptimizerConfig& config,
              const Eigen::VectorXd& x0, bool keep_iterates = false);

/// Discrete energy-dissipation check c_k >= (M_{k+1} - M_k) / (2 sqrt(h)) on a
/// trace with diagnostics; flag i refers to the step between records i and i+1.
std::vector<bool> stability_check(const std::vector<IterationRecord>& trace,
                                  const OptimizerConfig& config);

double stability_violation_fraction(const std::vector<IterationRecord>& trace,
                                    const OptimizerConfig& config);

}  // namespace egaa
