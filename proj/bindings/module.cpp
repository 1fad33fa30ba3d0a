#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "egaa/mixing.hpp"
#include "egaa/ode.hpp"
#include "egaa/optimizers.hpp"
#include "egaa/problems.hpp"

namespace py = pybind11;
using namespace egaa;

namespace {

py::dict metadata_dict(const ProblemMetadata& m) {
  auto opt = [](const std::optional<double>& v) -> py::object {
    return v ? py::cast(*v) : py::none();
  };
  py::dict d;
  d["lipschitz_L"] = opt(m.lipschitz_L);
  d["strong_convexity_mu"] = opt(m.strong_convexity_mu);
  d["condition_kappa"] = opt(m.condition_kappa);
  d["hessian_lipschitz_LH"] = opt(m.hessian_lipschitz_LH);
  d["minimizer_value_fstar"] = opt(m.minimizer_value_fstar);
  return d;
}

OptimizerConfig config_from_kwargs(const std::string& method, double beta, int depth_m,
                                   double lambda, bool lambda_is_absolute,
                                   double delta_max, double eta, double mass_floor_eps,
                                   long max_iters, double grad_tol,
                                   bool scale_guard_by_sqrt_beta) {
  OptimizerConfig cfg;
  cfg.method = method_from_name(method);
  cfg.step_beta = beta;
  cfg.depth_m = depth_m;
  cfg.lambda = lambda;
  cfg.lambda_is_absolute = lambda_is_absolute;
  cfg.delta_max = delta_max;
  cfg.eta = eta;
  cfg.mass_floor_eps = mass_floor_eps;
  cfg.max_iters = max_iters;
  cfg.grad_tol = grad_tol;
  cfg.scale_guard_by_sqrt_beta = scale_guard_by_sqrt_beta;
  return cfg;
}

py::dict run_result_dict(const RunResult& rr) {
  const auto n = static_cast<py::ssize_t>(rr.records.size());
  Eigen::VectorXd k(n), f(n), grad_norm(n), mass(n), delta_m(n), rho(n), c_k(n),
      gain(n), consistency(n), contraction(n);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (py::ssize_t i = 0; i < n; ++i) {
    const auto& r = rr.records[static_cast<std::size_t>(i)];
    k[i] = static_cast<double>(r.k);
    f[i] = r.f_value;
    grad_norm[i] = r.grad_norm;
    const StepDiagnostics d = r.diagnostics.value_or(StepDiagnostics{});
    const bool has = r.diagnostics.has_value();
    mass[i] = has ? d.effective_mass_M : nan;
    delta_m[i] = has ? d.delta_M : nan;
    rho[i] = has ? d.guard_rho : nan;
    c_k[i] = has ? d.damping_c : nan;
    gain[i] = has ? d.gain_delta : nan;
    consistency[i] = has ? d.consistency_sum : nan;
    contraction[i] = has ? d.realized_contraction : nan;
  }
  py::dict out;
  out["k"] = k;
  out["f"] = f;
  out["grad_norm"] = grad_norm;
  out["M_eff"] = mass;
  out["delta_M"] = delta_m;
  out["rho"] = rho;
  out["c_k"] = c_k;
  out["gain_delta"] = gain;
  out["consistency_sum"] = consistency;
  out["realized_contraction"] = contraction;
  out["status"] = rr.status == RunStatus::converged
                      ? "converged"
                      : (rr.status == RunStatus::diverged ? "diverged" : "max_iters");
  out["final_x"] = rr.final_x;
  if (!rr.iterates.empty()) out["iterates"] = rr.iterates;
  return out;
}

std::function<double(double)> as_schedule(const py::object& obj, double fallback) {
  if (obj.is_none()) return [fallback](double) { return fallback; };
  if (py::isinstance<py::float_>(obj) || py::isinstance<py::int_>(obj)) {
    const double v = obj.cast<double>();
    return [v](double) { return v; };
  }
  auto fn = obj.cast<std::function<double(double)>>();
  return fn;
}

py::dict trajectory_dict(const std::vector<OdeState>& traj) {
  const auto n = static_cast<py::ssize_t>(traj.size());
  const auto dim = n > 0 ? traj.front().x.size() : 0;
  Eigen::VectorXd t(n), v_norm(n), energy(n), dissipation(n);
  Eigen::MatrixXd x(n, dim);
  for (py::ssize_t i = 0; i < n; ++i) {
    const auto& s = traj[static_cast<std::size_t>(i)];
    t[i] = s.t;
    x.row(i) = s.x.transpose();
    v_norm[i] = s.v.norm();
    energy[i] = s.energy_E;
    dissipation[i] = s.dissipation;
  }
  py::dict out;
  out["t"] = t;
  out["x"] = x;
  out["v_norm"] = v_norm;
  out["energy_E"] = energy;
  out["dissipation_rate"] = dissipation;
  return out;
}

}  // namespace

PYBIND11_MODULE(_egaa, m) {
  m.doc() = "Anderson acceleration as adaptive momentum: energy-guarded optimizers, "
            "mixing diagnostics and continuous-time limits";

  py::class_<ProblemOracle>(m, "Problem")
      .def_property_readonly("dimension", &ProblemOracle::dimension)
      .def_property_readonly("metadata",
                             [](const ProblemOracle& p) { return metadata_dict(p.metadata()); })
      .def_property_readonly("has_projector", &ProblemOracle::has_projector)
      .def("value", &ProblemOracle::value, py::arg("x"))
      .def("gradient", &ProblemOracle::gradient, py::arg("x"))
      .def("hvp", &ProblemOracle::hvp, py::arg("x"), py::arg("v"))
      .def("projector", &ProblemOracle::projector, py::arg("x"));

  m.def("make_quadratic", &make_quadratic, py::arg("n"), py::arg("kappa"),
        py::arg("spacing") = "uniform");
  m.def("make_rosenbrock", &make_rosenbrock, py::arg("a"));
  m.def("make_logistic", &make_logistic, py::arg("samples"), py::arg("features"),
        py::arg("mu"), py::arg("seed"));
  m.def(
      "make_nnls",
      [](int samples_M, int features_n, double mu, double sparsity_p, double noise_sigma,
         double singular_low, double singular_high, std::uint64_t seed) {
        NnlsSpec s;
        s.samples_M = samples_M;
        s.features_n = features_n;
        s.regularization_mu = mu;
        s.sparsity_p = sparsity_p;
        s.noise_sigma = noise_sigma;
        s.singular_low = singular_low;
        s.singular_high = singular_high;
        s.seed = seed;
        return make_nnls(s);
      },
      py::arg("samples_M") = 2000, py::arg("features_n") = 500, py::arg("mu") = 5e-4,
      py::arg("sparsity_p") = 0.005, py::arg("noise_sigma") = 0.5,
      py::arg("singular_low") = 1e-4, py::arg("singular_high") = 1.0, py::arg("seed") = 0);

  m.def("fixed_point_map", &fixed_point_map, py::arg("problem"), py::arg("x"),
        py::arg("beta"));
  m.def("residual", &residual, py::arg("problem"), py::arg("x"), py::arg("beta"));

  m.def(
      "solve_type2",
      [](const Eigen::VectorXd& r, const Eigen::MatrixXd& R, double lambda) {
        const auto mc = solve_type2(r, R, lambda);
        return py::make_tuple(mc.theta, mc.lambda_used);
      },
      py::arg("r"), py::arg("R"), py::arg("lambda_") = 0.0);
  m.def(
      "solve_type1",
      [](const Eigen::VectorXd& dx, const Eigen::MatrixXd& X, double lambda) {
        const auto mc = solve_type1(dx, X, lambda);
        return py::make_tuple(mc.theta, mc.lambda_used);
      },
      py::arg("dx_target"), py::arg("X"), py::arg("lambda_") = 0.0);
  m.def(
      "theta_to_gamma",
      [](const Eigen::VectorXd& theta) { return theta_to_gamma(theta).gamma; },
      py::arg("theta"));
  m.def(
      "gamma_to_theta",
      [](const Eigen::VectorXd& gamma) { return gamma_to_theta(gamma).theta; },
      py::arg("gamma"));
  m.def("effective_mass", &effective_mass, py::arg("gamma"));
  m.def(
      "consistency_deviation",
      [](const Eigen::VectorXd& gamma, double h) {
        const auto [sum, c] = consistency_deviation(gamma, h);
        return py::make_tuple(sum, c);
      },
      py::arg("gamma"), py::arg("h"));
  m.def("gain_factor", &gain_factor, py::arg("grad"), py::arg("R"),
        py::arg("lambda_") = 0.0);
  m.def("energy_guard", &energy_guard, py::arg("M_curr"), py::arg("M_prev"),
        py::arg("delta_max"), py::arg("mass_floor_eps") = 1e-3);

  m.def(
      "run",
      [](const ProblemOracle& problem, const Eigen::VectorXd& x0, const std::string& method,
         double beta, int depth_m, double lambda, bool lambda_is_absolute,
         double delta_max, double eta, double mass_floor_eps, long max_iters,
         double grad_tol, bool scale_guard_by_sqrt_beta, bool keep_iterates) {
        const auto cfg = config_from_kwargs(method, beta, depth_m, lambda,
                                            lambda_is_absolute, delta_max, eta,
                                            mass_floor_eps, max_iters, grad_tol,
                                            scale_guard_by_sqrt_beta);
        return run_result_dict(run(problem, cfg, x0, keep_iterates));
      },
      py::arg("problem"), py::arg("x0"), py::arg("method") = "egaa",
      py::arg("beta") = 0.1, py::arg("depth_m") = 3, py::arg("lambda_") = 1e-10,
      py::arg("lambda_is_absolute") = false, py::arg("delta_max") = 2.0,
      py::arg("eta") = 0.0, py::arg("mass_floor_eps") = 1e-3,
      py::arg("max_iters") = 1000, py::arg("grad_tol") = 1e-8,
      py::arg("scale_guard_by_sqrt_beta") = false, py::arg("keep_iterates") = false);

  m.def(
      "integrate_avd",
      [](const ProblemOracle& p, const Eigen::VectorXd& x0, double t0, double T,
         double dt) { return trajectory_dict(integrate_avd(p, x0, t0, T, dt)); },
      py::arg("problem"), py::arg("x0"), py::arg("t0"), py::arg("T"), py::arg("dt"));

  auto schedules_from_kwargs = [](const py::object& mass, const py::object& damping,
                                  const py::object& geom_beta, double sqrt_h,
                                  double mass_floor) {
    Schedules s;
    s.mass_M = as_schedule(mass, 1.0);
    s.damping_c = as_schedule(damping, 0.0);
    s.geom_beta = as_schedule(geom_beta, 1.0);
    s.sqrt_h = sqrt_h;
    s.mass_floor = mass_floor;
    return s;
  };
  m.def(
      "integrate_variable_mass",
      [schedules_from_kwargs](const ProblemOracle& p, const Eigen::VectorXd& x0,
                              const Eigen::VectorXd& v0, double t0, double T, double dt,
                              const py::object& mass, const py::object& damping,
                              double mass_floor) {
        const auto s = schedules_from_kwargs(mass, damping, py::none(), 0.0, mass_floor);
        return trajectory_dict(integrate_variable_mass(p, s, x0, v0, t0, T, dt));
      },
      py::arg("problem"), py::arg("x0"), py::arg("v0"), py::arg("t0"), py::arg("T"),
      py::arg("dt"), py::arg("mass") = py::none(), py::arg("damping") = py::none(),
      py::arg("mass_floor") = 1e-3);
  m.def(
      "integrate_ishd",
      [schedules_from_kwargs](const ProblemOracle& p, const Eigen::VectorXd& x0,
                              const Eigen::VectorXd& v0, double t0, double T, double dt,
                              const py::object& mass, const py::object& damping,
                              const py::object& geom_beta, double sqrt_h,
                              double mass_floor) {
        const auto s = schedules_from_kwargs(mass, damping, geom_beta, sqrt_h, mass_floor);
        return trajectory_dict(integrate_ishd(p, s, x0, v0, t0, T, dt));
      },
      py::arg("problem"), py::arg("x0"), py::arg("v0"), py::arg("t0"), py::arg("T"),
      py::arg("dt"), py::arg("mass") = py::none(), py::arg("damping") = py::none(),
      py::arg("geom_beta") = py::none(), py::arg("sqrt_h") = 0.0,
      py::arg("mass_floor") = 1e-3);

  m.attr("__version__") = "0.1.0";
}
