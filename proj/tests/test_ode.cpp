#include <doctest.h>

#include <cmath>

#include "egaa/ode.hpp"
#include "egaa/problems.hpp"
#include "egaa/rng.hpp"

using namespace egaa;

namespace {

Schedules constant_schedules(double mass, double damping, double beta = 1.0,
                             double sqrt_h = 0.0) {
  Schedules s;
  s.mass_M = [mass](double) { return mass; };
  s.damping_c = [damping](double) { return damping; };
  s.geom_beta = [beta](double) { return beta; };
  s.sqrt_h = sqrt_h;
  return s;
}

}  // namespace

TEST_CASE("avd integration") {
  const auto p = make_quadratic(1, 1.0);  // f = x^2 / 2

  SUBCASE("equilibrium stays put") {
    const auto traj = integrate_avd(p, Eigen::VectorXd::Zero(1), 0.5, 5.0, 1e-2);
    for (const auto& s : traj) {
      CHECK(s.x.norm() == 0.0);
      CHECK(s.v.norm() == 0.0);
    }
  }
  SUBCASE("fourth-order self convergence") {
    const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(1);
    const auto endpoint = [&](double dt) {
      return integrate_avd(p, x0, 0.1, 5.0, dt).back().x[0];
    };
    const double c1 = endpoint(4e-3), c2 = endpoint(2e-3), c3 = endpoint(1e-3);
    const double d1 = std::abs(c2 - c1), d2 = std::abs(c3 - c2);
    CHECK(d2 * 10.0 <= d1);  // halving dt shrinks the update by ~16x
  }
  SUBCASE("t0 at the damping singularity is rejected") {
    CHECK_THROWS_AS(integrate_avd(p, Eigen::VectorXd::Ones(1), 0.0, 1.0, 1e-3),
                    std::invalid_argument);
  }
}

TEST_CASE("variable mass integration") {
  const auto p = make_quadratic(1, 1.0);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(1);
  const Eigen::VectorXd v0 = Eigen::VectorXd::Zero(1);

  SUBCASE("reduces to the vanishing-damping system") {
    Schedules avd_like;
    avd_like.mass_M = [](double) { return 1.0; };
    avd_like.damping_c = [](double t) { return 3.0 / t; };
    const auto a = integrate_avd(p, x0, 0.1, 5.0, 1e-3);
    const auto b = integrate_variable_mass(p, avd_like, x0, v0, 0.1, 5.0, 1e-3);
    REQUIRE(a.size() == b.size());
    CHECK(a.back().x == b.back().x);  // same arithmetic path
  }
  SUBCASE("frictionless heavy particle conserves energy") {
    const auto traj =
        integrate_variable_mass(p, constant_schedules(2.0, 0.0), x0, v0, 0.0, 10.0, 1e-3);
    const double e0 = traj.front().energy_E;
    for (const auto& s : traj) CHECK(std::abs(s.energy_E - e0) <= 1e-6);
  }
  SUBCASE("mass growth with weak damping injects energy") {
    Schedules s;
    s.mass_M = [](double t) { return 1.0 + 0.5 * t; };
    s.damping_c = [](double) { return 0.1; };  // below Mdot/2 = 0.25
    const auto traj = integrate_variable_mass(p, s, x0, v0, 0.0, 10.0, 1e-3);
    double max_step_gain = 0.0;
    for (std::size_t i = 1; i < traj.size(); ++i)
      max_step_gain = std::max(max_step_gain, traj[i].energy_E - traj[i - 1].energy_E);
    CHECK(max_step_gain > 0.0);
    CHECK(traj.back().energy_E > traj.front().energy_E);
  }
  SUBCASE("mass below the floor aborts") {
    Schedules s = constant_schedules(1e-6, 0.0);
    CHECK_THROWS_AS(integrate_variable_mass(p, s, x0, v0, 0.0, 1.0, 1e-3),
                    std::runtime_error);
  }
}

TEST_CASE("ishd integration") {
  const auto p = make_quadratic(2, 10.0);
  Eigen::VectorXd x0(2), v0(2);
  x0 << 1.0, 1.0;
  v0 << 0.0, 0.0;

  SUBCASE("sqrt_h = 0 coincides with the variable-mass system") {
    const auto s = constant_schedules(1.0, 0.2);
    const auto a = integrate_variable_mass(p, s, x0, v0, 0.0, 5.0, 1e-3);
    const auto b = integrate_ishd(p, s, x0, v0, 0.0, 5.0, 1e-3);
    CHECK(a.back().x == b.back().x);
  }
  SUBCASE("pure Hessian damping dissipates on a convex quadratic") {
    const auto s = constant_schedules(1.0, 0.0, 1.0, 0.1);
    const auto traj = integrate_ishd(p, s, x0, v0, 0.0, 10.0, 1e-3);
    for (std::size_t i = 1; i < traj.size(); ++i)
      CHECK(traj[i].energy_E <= traj[i - 1].energy_E + 1e-8);
  }
  SUBCASE("stiff oscillations shrink as the damping scale grows") {
    const auto stiff = make_quadratic(2, 100.0);
    auto amplitude = [&](double sqrt_h) {
      const auto s = constant_schedules(1.0, 0.0, 1.0, sqrt_h);
      const auto traj = integrate_ishd(stiff, s, x0, v0, 0.0, 10.0, 1e-3);
      double amp = 0.0;
      for (const auto& st : traj)
        if (st.t >= 5.0) amp = std::max(amp, std::abs(st.x[1]));  // stiff coordinate
      return amp;
    };
    const double a0 = amplitude(0.0), a1 = amplitude(0.03), a2 = amplitude(0.1);
    CHECK(a1 < a0);
    CHECK(a2 < a1);
  }
}

TEST_CASE("dissipation rate") {
  const auto p = make_quadratic(2, 4.0);

  SUBCASE("zero velocity dissipates nothing") {
    OdeState s;
    s.t = 1.0;
    s.x = Eigen::VectorXd::Ones(2);
    s.v = Eigen::VectorXd::Zero(2);
    CHECK(dissipation_rate(p, s, constant_schedules(1.0, 0.7), 0.3) == 0.0);
  }
  SUBCASE("damping equal to half the mass rate cancels exactly") {
    OdeState s;
    s.t = 2.0;
    s.x = Eigen::VectorXd::Ones(2);
    s.v = Eigen::VectorXd::Constant(2, 0.8);
    const double mass_dot = 0.6;
    CHECK(dissipation_rate(p, s, constant_schedules(1.0, 0.3), mass_dot) == 0.0);
  }
  SUBCASE("matches a finite difference of the energy along a trajectory") {
    Schedules s;
    s.mass_M = [](double t) { return 1.0 + 0.1 * t; };
    s.damping_c = [](double) { return 0.05; };
    s.geom_beta = [](double) { return 1.0; };
    s.sqrt_h = 0.1;
    Eigen::VectorXd x0(2), v0(2);
    x0 << 1.0, -0.5;
    v0 << 0.2, 0.0;
    const double dt = 1e-3;
    const auto traj = integrate_ishd(p, s, x0, v0, 0.0, 3.0, dt);
    double max_rate = 0.0;
    for (const auto& st : traj) max_rate = std::max(max_rate, std::abs(st.dissipation));
    for (std::size_t i = 1; i + 1 < traj.size(); i += 100) {
      const double fd = (traj[i + 1].energy_E - traj[i - 1].energy_E) / (2.0 * dt);
      if (std::abs(fd) < 1e-3 * max_rate) continue;  // rate crosses zero here
      CHECK(std::abs(traj[i].dissipation - fd) / std::abs(fd) <= 1e-3);
    }
  }
}

TEST_CASE("energy bookkeeping") {
  // |E_{i+1} - E_i - dt * rate(midpoint)| shrinks like dt^2 when dt halves.
  const auto p = make_quadratic(2, 4.0);
  Schedules s;
  s.mass_M = [](double t) { return 1.0 + 0.2 * t; };
  s.damping_c = [](double) { return 0.15; };
  s.geom_beta = [](double) { return 1.0; };
  s.sqrt_h = 0.05;
  Eigen::VectorXd x0(2), v0(2);
  x0 << 1.0, -0.4;
  v0 << 0.1, 0.2;
  auto worst_defect = [&](double dt) {
    const auto traj = integrate_ishd(p, s, x0, v0, 0.0, 2.0, dt);
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
      const double mid_rate = 0.5 * (traj[i].dissipation + traj[i + 1].dissipation);
      worst = std::max(worst,
                       std::abs(traj[i + 1].energy_E - traj[i].energy_E - dt * mid_rate));
    }
    return worst;
  };
  const double d1 = worst_defect(2e-3), d2 = worst_defect(1e-3);
  CHECK(d2 <= d1 / 3.0);  // one halving, roughly a factor of four
}

TEST_CASE("discrete vs ode deviation") {
  const auto p = make_quadratic(1, 1.0);

  SUBCASE("sampling the trajectory compares to itself") {
    const double h = 0.01, sqrt_h = 0.1;
    const auto traj =
        integrate_avd(p, Eigen::VectorXd::Ones(1), sqrt_h, 50 * sqrt_h, 1e-4);
    std::vector<Eigen::VectorXd> iterates;
    for (int k = 0; k <= 40; ++k) {
      const double t = std::max(k * sqrt_h, sqrt_h);
      const auto it = std::lower_bound(
          traj.begin(), traj.end(), t,
          [](const OdeState& s, double tt) { return s.t < tt; });
      iterates.push_back(it->x);
    }
    // node snapping plus linear interpolation each contribute O(dt)
    CHECK(discrete_vs_ode_deviation(iterates, traj, h) <= 1e-3);
  }
  SUBCASE("coverage gaps are rejected") {
    const auto traj = integrate_avd(p, Eigen::VectorXd::Ones(1), 0.1, 1.0, 1e-3);
    std::vector<Eigen::VectorXd> iterates(200, Eigen::VectorXd::Ones(1));
    CHECK_THROWS_AS(discrete_vs_ode_deviation(iterates, traj, 0.01),
                    std::invalid_argument);
  }
}

TEST_CASE("schedules_from_trace") {
  auto rec = [](long k, double mass, double c, double beta_sum) {
    IterationRecord r;
    r.k = k;
    StepDiagnostics d;
    d.effective_mass_M = mass;
    d.damping_c = c;
    d.consistency_sum = beta_sum;
    r.diagnostics = d;
    return r;
  };

  SUBCASE("constant diagnostics give constant schedules") {
    std::vector<IterationRecord> trace;
    for (long k = 1; k <= 5; ++k) trace.push_back(rec(k, 0.8, 2.0, 0.9));
    const auto s = schedules_from_trace(trace, 0.04);
    for (double t : {0.0, 0.3, 1.0, 9.0}) {
      CHECK(s.mass_M(t) == 0.8);
      CHECK(s.damping_c(t) == 2.0);
      CHECK(s.geom_beta(t) == 0.9);
    }
    CHECK(s.sqrt_h == doctest::Approx(0.2));
  }
  SUBCASE("interpolant slope matches the discrete mass rate") {
    std::vector<IterationRecord> trace;
    const double masses[] = {1.0, 1.4, 1.1, 1.8};
    for (long k = 1; k <= 4; ++k) trace.push_back(rec(k, masses[k - 1], 0.0, 1.0));
    const double h = 0.09, sqrt_h = 0.3;
    const auto s = schedules_from_trace(trace, h);
    for (long k = 1; k <= 3; ++k) {
      const double mid = (k + 0.5) * sqrt_h;
      const double eps = 1e-6;
      const double slope = (s.mass_M(mid + eps) - s.mass_M(mid - eps)) / (2.0 * eps);
      CHECK(slope ==
            doctest::Approx((masses[k] - masses[k - 1]) / sqrt_h).epsilon(1e-6));
    }
  }
  SUBCASE("gradient-descent-degenerate diagnostics") {
    // gamma = 0 at every step: mass 1/2, consistency 0, c = 1 / sqrt(h).
    const double h = 0.25;
    std::vector<IterationRecord> trace;
    for (long k = 1; k <= 3; ++k) trace.push_back(rec(k, 0.5, 1.0 / std::sqrt(h), 0.0));
    const auto s = schedules_from_trace(trace, h);
    CHECK(s.mass_M(0.7) == 0.5);
    CHECK(s.damping_c(0.7) == doctest::Approx(2.0));  // 1 / sqrt(0.25)
    CHECK(s.geom_beta(0.7) == 0.0);
  }
  SUBCASE("mass floor applies") {
    std::vector<IterationRecord> trace{rec(1, 1e-9, 0.0, 1.0), rec(2, 1e-9, 0.0, 1.0)};
    const auto s = schedules_from_trace(trace, 0.01, 1e-3);
    CHECK(s.mass_M(0.15) == 1e-3);
  }
  SUBCASE("empty trace is rejected") {
    CHECK_THROWS_AS(schedules_from_trace({}, 0.01), std::invalid_argument);
    std::vector<IterationRecord> no_diag(3);
    CHECK_THROWS_AS(schedules_from_trace(no_diag, 0.01), std::invalid_argument);
  }
}

TEST_CASE("discrete accelerated descent approaches the vanishing-damping flow") {
  // The t_k-schedule method on f = x^2/2 against the continuous system, with
  // the deviation shrinking as h does.
  const auto p = make_quadratic(1, 1.0);
  auto deviation = [&](double h) {
    const double sqrt_h = std::sqrt(h);
    const long K = static_cast<long>(std::floor(8.0 / sqrt_h));
    OptimizerConfig cfg;
    cfg.method = Method::nag;
    cfg.step_beta = h;
    cfg.max_iters = K;
    cfg.grad_tol = 0.0;
    const auto rr = run(p, cfg, Eigen::VectorXd::Ones(1), true);
    const auto traj =
        integrate_avd(p, Eigen::VectorXd::Ones(1), sqrt_h, (K + 1) * sqrt_h,
                      std::min(1e-3, sqrt_h / 10.0));
    return discrete_vs_ode_deviation(rr.iterates, traj, h);
  };
  const double d1 = deviation(1e-2), d2 = deviation(1e-3);
  CHECK(d2 < d1);
}
