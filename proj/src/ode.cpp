#include "egaa/ode.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace egaa {

namespace {

// Acceleration field of the integrated systems. hessian_force toggles the
// sqrt_h beta(t) hessian(x) v term.
struct Dynamics {
  const ProblemOracle& problem;
  const Schedules& schedules;
  bool hessian_force;

  Eigen::VectorXd acceleration(double t, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& v) const {
    const double mass = schedules.mass_M(t);
    Eigen::VectorXd force = -schedules.damping_c(t) * v - problem.gradient(x);
    if (hessian_force && schedules.sqrt_h != 0.0)
      force -= schedules.sqrt_h * schedules.geom_beta(t) * problem.hvp(x, v);
    return force / mass;
  }
};

double energy_of(const ProblemOracle& problem, const Schedules& schedules, double t,
                 const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
  const double fstar = problem.metadata().minimizer_value_fstar.value_or(0.0);
  return 0.5 * schedules.mass_M(t) * v.squaredNorm() + (problem.value(x) - fstar);
}

double centered_mass_dot(const Schedules& schedules, double t, double dt) {
  return (schedules.mass_M(t + dt) - schedules.mass_M(t - dt)) / (2.0 * dt);
}

std::vector<OdeState> integrate(const ProblemOracle& problem, const Schedules& schedules,
                                const Eigen::VectorXd& x0, const Eigen::VectorXd& v0,
                                double t0, double T, double dt, bool hessian_force) {
  if (dt <= 0.0) throw std::invalid_argument("integrate: dt must be > 0");
  if (T <= t0) throw std::invalid_argument("integrate: T must exceed t0");
  if (x0.size() != problem.dimension() || v0.size() != x0.size())
    throw std::invalid_argument("integrate: state dimension mismatch");

  const Dynamics dyn{problem, schedules, hessian_force};
  const long nsteps = static_cast<long>(std::llround((T - t0) / dt));

  // Fail fast on an invalid mass schedule rather than dividing by ~0 later.
  for (long i = 0; i <= nsteps; ++i) {
    const double t = t0 + i * dt;
    if (schedules.mass_M(t) < schedules.mass_floor)
      throw std::runtime_error("integrate: mass schedule below floor at t = " +
                               std::to_string(t));
  }

  std::vector<OdeState> out;
  out.reserve(static_cast<std::size_t>(nsteps) + 1);
  Eigen::VectorXd x = x0, v = v0;
  double t = t0;

  auto record = [&](double tt, const Eigen::VectorXd& xx, const Eigen::VectorXd& vv) {
    OdeState s;
    s.t = tt;
    s.x = xx;
    s.v = vv;
    s.energy_E = energy_of(problem, schedules, tt, xx, vv);
    s.dissipation = dissipation_rate(problem, s, schedules,
                                     centered_mass_dot(schedules, tt, dt));
    out.push_back(std::move(s));
  };
  record(t, x, v);

  for (long i = 0; i < nsteps; ++i) {
    // Classical RK4 on the first-order system (x, v).
    const Eigen::VectorXd k1x = v;
    const Eigen::VectorXd k1v = dyn.acceleration(t, x, v);
    const Eigen::VectorXd k2x = v + 0.5 * dt * k1v;
    const Eigen::VectorXd k2v =
        dyn.acceleration(t + 0.5 * dt, x + 0.5 * dt * k1x, v + 0.5 * dt * k1v);
    const Eigen::VectorXd k3x = v + 0.5 * dt * k2v;
    const Eigen::VectorXd k3v =
        dyn.acceleration(t + 0.5 * dt, x + 0.5 * dt * k2x, v + 0.5 * dt * k2v);
    const Eigen::VectorXd k4x = v + dt * k3v;
    const Eigen::VectorXd k4v = dyn.acceleration(t + dt, x + dt * k3x, v + dt * k3v);

    x += (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    t = t0 + (i + 1) * dt;

    if (!x.allFinite() || !v.allFinite()) break;  // abort, keep partial trajectory
    record(t, x, v);
  }
  return out;
}

}  // namespace

std::vector<OdeState> integrate_avd(const ProblemOracle& problem,
                                    const Eigen::VectorXd& x0, double t0, double T,
                                    double dt) {
  if (t0 <= 0.0) throw std::invalid_argument("integrate_avd: t0 must be > 0");
  Schedules avd;
  avd.mass_M = [](double) { return 1.0; };
  avd.damping_c = [](double t) { return 3.0 / t; };
  avd.sqrt_h = 0.0;
  return integrate(problem, avd, x0, Eigen::VectorXd::Zero(x0.size()), t0, T, dt,
                   false);
}

std::vector<OdeState> integrate_variable_mass(const ProblemOracle& problem,
                                              const Schedules& schedules,
                                              const Eigen::VectorXd& x0,
                                              const Eigen::VectorXd& v0, double t0,
                                              double T, double dt) {
  return integrate(problem, schedules, x0, v0, t0, T, dt, false);
}

std::vector<OdeState> integrate_ishd(const ProblemOracle& problem,
                                     const Schedules& schedules,
                                     const Eigen::VectorXd& x0, const Eigen::VectorXd& v0,
                                     double t0, double T, double dt) {
  return integrate(problem, schedules, x0, v0, t0, T, dt, true);
}

double dissipation_rate(const ProblemOracle& problem, const OdeState& state,
                        const Schedules& schedules, double mass_dot) {
  const double damping = schedules.damping_c(state.t);
  double rate = -(damping - 0.5 * mass_dot) * state.v.squaredNorm();
  if (schedules.sqrt_h != 0.0)
    rate -= schedules.sqrt_h * schedules.geom_beta(state.t) *
            state.v.dot(problem.hvp(state.x, state.v));
  return rate;
}

double discrete_vs_ode_deviation(const std::vector<Eigen::VectorXd>& iterates,
                                 const std::vector<OdeState>& trajectory, double h) {
  if (h <= 0.0) throw std::invalid_argument("discrete_vs_ode_deviation: h must be > 0");
  if (iterates.size() < 2 || trajectory.size() < 2)
    throw std::invalid_argument("discrete_vs_ode_deviation: need at least two samples");

  const double sqrt_h = std::sqrt(h);
  const double t_lo = trajectory.front().t;
  const double t_hi = trajectory.back().t;
  const std::size_t K = iterates.size() - 1;
  const double slack = 1e-9 * sqrt_h;
  if (t_lo > sqrt_h + slack || t_hi < K * sqrt_h - slack)
    throw std::invalid_argument(
        "discrete_vs_ode_deviation: trajectory does not cover [sqrt(h), K sqrt(h)]");

  double sup = 0.0;
  std::size_t node = 0;
  for (std::size_t k = 1; k <= K; ++k) {
    const double t = k * sqrt_h;
    while (node + 1 < trajectory.size() && trajectory[node + 1].t < t) ++node;
    const auto& a = trajectory[node];
    const auto& b = trajectory[std::min(node + 1, trajectory.size() - 1)];
    Eigen::VectorXd xt;
    if (b.t > a.t) {
      const double w = std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0);
      xt = (1.0 - w) * a.x + w * b.x;
    } else {
      xt = a.x;
    }
    sup = std::max(sup, (iterates[k] - xt).norm());
  }
  return sup;
}

Schedules schedules_from_trace(const std::vector<IterationRecord>& trace, double h,
                               double mass_floor) {
  if (h <= 0.0) throw std::invalid_argument("schedules_from_trace: h must be > 0");
  auto knots = std::make_shared<std::vector<double>>();
  auto mass = std::make_shared<std::vector<double>>();
  auto damping = std::make_shared<std::vector<double>>();
  auto beta = std::make_shared<std::vector<double>>();

  const double sqrt_h = std::sqrt(h);
  for (const auto& rec : trace) {
    if (!rec.diagnostics) continue;
    knots->push_back(rec.k * sqrt_h);
    mass->push_back(std::max(rec.diagnostics->effective_mass_M, mass_floor));
    damping->push_back(rec.diagnostics->damping_c);
    beta->push_back(rec.diagnostics->consistency_sum);
  }
  if (knots->empty())
    throw std::invalid_argument("schedules_from_trace: trace has no diagnostics");

  auto interp = [knots](std::shared_ptr<std::vector<double>> vals) {
    return [knots, vals](double t) {
      const auto& ts = *knots;
      const auto& ys = *vals;
      if (t <= ts.front()) return ys.front();
      if (t >= ts.back()) return ys.back();
      const auto it = std::upper_bound(ts.begin(), ts.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - ts.begin());
      const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
      return (1.0 - w) * ys[i - 1] + w * ys[i];
    };
  };

  Schedules out;
  out.mass_M = interp(mass);
  out.damping_c = interp(damping);
  out.geom_beta = interp(beta);
  out.sqrt_h = sqrt_h;
  out.mass_floor = mass_floor;
  return out;
}

}  // namespace egaa
