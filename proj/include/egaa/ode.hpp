#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "egaa/optimizers.hpp"
#include "egaa/problems.hpp"

namespace egaa {

/// Continuous state sample. energy_E = 1/2 M(t) ||v||^2 + (f(x) - f*) with
/// f* taken from the problem metadata when known.
struct OdeState {
  double t = 0.0;
  Eigen::VectorXd x, v;
  double energy_E = 0.0;
  double dissipation = 0.0;  // analytic dE/dt at this node
};

/// Time-dependent coefficients of the second-order systems.
struct Schedules {
  std::function<double(double)> mass_M = [](double) { return 1.0; };
  std::function<double(double)> damping_c = [](double) { return 0.0; };
  std::function<double(double)> geom_beta = [](double) { return 1.0; };
  double sqrt_h = 0.0;
  double mass_floor = 1e-3;
};

/// Asymptotic-vanishing-damping system xdd + (3/t) xd + grad f = 0 integrated
/// with classical fourth-order Runge-Kutta from rest, v(t0) = 0. Requires
/// t0 > 0. Non-finite states abort the integration, returning the partial
/// trajectory.
std::vector<OdeState> integrate_avd(const ProblemOracle& problem,
                                    const Eigen::VectorXd& x0, double t0, double T,
                                    double dt);

/// Variable-mass system M(t) xdd + c(t) xd + grad f = 0. Throws if the mass
/// schedule dips below the configured floor on the integration interval.
std::vector<OdeState> integrate_variable_mass(const ProblemOracle& problem,
                                              const Schedules& schedules,
                                              const Eigen::VectorXd& x0,
                                              const Eigen::VectorXd& v0, double t0,
                                              double T, double dt);

/// High-resolution system with the Hessian damping force
/// M xdd + c xd + grad f + sqrt_h beta(t) hessian(x) xd = 0.
std::vector<OdeState> integrate_ishd(const ProblemOracle& problem,
                                     const Schedules& schedules,
                                     const Eigen::VectorXd& x0, const Eigen::VectorXd& v0,
                                     double t0, double T, double dt);

/// Analytic energy decay rate
///   -(c(t) - 1/2 Mdot) ||v||^2 - sqrt_h beta(t) <v, hessian(x) v>.
double dissipation_rate(const ProblemOracle& problem, const OdeState& state,
                        const Schedules& schedules, double mass_dot);

/// Sup over k of ||x_k - x(k sqrt(h))|| with linear interpolation between
/// trajectory nodes. The trajectory must cover [sqrt(h), K sqrt(h)].
double discrete_vs_ode_deviation(const std::vector<Eigen::VectorXd>& iterates,
                                 const std::vector<OdeState>& trajectory, double h);

/// Piecewise-linear schedules through the per-iteration diagnostics of an
/// AA-family trace under the scaling t_k = k sqrt(h): M(t) from the realized
/// masses (floored), c(t) from the damping coefficients, beta(t) from the
/// consistency sums.
Schedules schedules_from_trace(const std::vector<IterationRecord>& trace, double h,
                               double mass_floor = 1e-3);

}  // namespace egaa
