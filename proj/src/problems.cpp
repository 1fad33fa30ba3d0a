#include "egaa/problems.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "egaa/rng.hpp"

namespace egaa {

ProblemOracle::ProblemOracle(int dimension, ValueFn value, GradFn gradient,
                             ProblemMetadata metadata, HvpFn hvp, ProjFn projector,
                             ValueGradFn value_and_gradient)
    : dimension_(dimension),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      value_grad_(std::move(value_and_gradient)),
      hvp_(std::move(hvp)),
      projector_(std::move(projector)),
      metadata_(metadata) {
  if (dimension_ < 1) throw std::invalid_argument("ProblemOracle: dimension must be >= 1");
  if (!value_ || !gradient_)
    throw std::invalid_argument("ProblemOracle: value and gradient are required");
}

void ProblemOracle::check_dim(const Eigen::VectorXd& x) const {
  if (x.size() != dimension_)
    throw std::invalid_argument("ProblemOracle: vector has size " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(dimension_));
}

double ProblemOracle::value(const Eigen::VectorXd& x) const {
  check_dim(x);
  return value_(x);
}

Eigen::VectorXd ProblemOracle::gradient(const Eigen::VectorXd& x) const {
  check_dim(x);
  return gradient_(x);
}

std::pair<double, Eigen::VectorXd> ProblemOracle::value_and_gradient(
    const Eigen::VectorXd& x) const {
  check_dim(x);
  if (value_grad_) return value_grad_(x);
  return {value_(x), gradient_(x)};
}

Eigen::VectorXd ProblemOracle::hvp(const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& v) const {
  check_dim(x);
  check_dim(v);
  if (hvp_) return hvp_(x, v);
  // Central difference of the gradient along v.
  const double eps = std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + x.norm());
  const double vnorm = v.norm();
  if (vnorm == 0.0) return Eigen::VectorXd::Zero(dimension_);
  const double step = eps / vnorm;
  return (gradient_(x + step * v) - gradient_(x - step * v)) / (2.0 * step);
}

Eigen::VectorXd ProblemOracle::projector(const Eigen::VectorXd& x) const {
  check_dim(x);
  if (projector_) return projector_(x);
  return x;
}

ProblemOracle make_quadratic(int n, double kappa, const std::string& spacing) {
  if (n < 1) throw std::invalid_argument("make_quadratic: n must be >= 1");
  if (kappa < 1.0) throw std::invalid_argument("make_quadratic: kappa must be >= 1");
  if (spacing != "uniform")
    throw std::invalid_argument("make_quadratic: unknown spacing '" + spacing + "'");

  Eigen::VectorXd eigs(n);
  if (n == 1) {
    eigs[0] = 1.0;
  } else {
    for (int i = 0; i < n; ++i)
      eigs[i] = 1.0 + (kappa - 1.0) * static_cast<double>(i) / (n - 1);
  }

  ProblemMetadata meta;
  meta.lipschitz_L = kappa;
  meta.strong_convexity_mu = 1.0;
  meta.condition_kappa = kappa;
  meta.hessian_lipschitz_LH = 0.0;
  meta.minimizer_value_fstar = 0.0;

  auto value = [eigs](const Eigen::VectorXd& x) {
    return 0.5 * x.dot(eigs.cwiseProduct(x));
  };
  auto grad = [eigs](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return eigs.cwiseProduct(x);
  };
  auto hvp = [eigs](const Eigen::VectorXd&, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return eigs.cwiseProduct(v);
  };
  return ProblemOracle(n, value, grad, meta, hvp);
}

ProblemOracle make_rosenbrock(double a) {
  if (a <= 0.0) throw std::invalid_argument("make_rosenbrock: a must be > 0");

  ProblemMetadata meta;
  meta.minimizer_value_fstar = 0.0;

  auto value = [a](const Eigen::VectorXd& x) {
    const double u = 1.0 - x[0];
    const double w = x[1] - x[0] * x[0];
    return u * u + a * w * w;
  };
  auto grad = [a](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const double w = x[1] - x[0] * x[0];
    Eigen::VectorXd g(2);
    g[0] = -2.0 * (1.0 - x[0]) - 4.0 * a * x[0] * w;
    g[1] = 2.0 * a * w;
    return g;
  };
  return ProblemOracle(2, value, grad, meta);
}

ProblemOracle make_logistic(int samples, int features, double mu, std::uint64_t seed) {
  if (samples < 1 || features < 1)
    throw std::invalid_argument("make_logistic: samples and features must be >= 1");
  if (mu < 0.0) throw std::invalid_argument("make_logistic: mu must be >= 0");

  Rng rng(seed);
  Eigen::MatrixXd A = rng.normal_matrix(samples, features);
  Eigen::VectorXd planted = rng.normal_vector(features);
  Eigen::VectorXd labels(samples);
  {
    Eigen::VectorXd margin = A * planted;
    for (int i = 0; i < samples; ++i) {
      const double z = margin[i] + 0.1 * rng.normal();
      labels[i] = z >= 0.0 ? 1.0 : -1.0;
    }
    for (int i = 0; i < samples; ++i)
      if (rng.uniform() < 0.05) labels[i] = -labels[i];
  }

  // Spectral norm of A by power iteration on A^T A, fixed iteration count.
  double spec_sq = 0.0;
  {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(features).normalized();
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd w = A.transpose() * (A * v);
      spec_sq = w.norm();
      if (spec_sq == 0.0) break;
      v = w / spec_sq;
    }
  }

  ProblemMetadata meta;
  meta.lipschitz_L = spec_sq / (4.0 * samples) + mu;
  meta.strong_convexity_mu = mu;

  const double inv_m = 1.0 / samples;
  auto softplus = [](double z) {
    // log(1 + exp(z)) without overflow
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  };

  auto value_grad = [A, labels, mu, inv_m, softplus](const Eigen::VectorXd& x)
      -> std::pair<double, Eigen::VectorXd> {
    Eigen::VectorXd margin = A * x;  // shared between value and gradient
    double loss = 0.0;
    Eigen::VectorXd weights(labels.size());
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
      const double ym = labels[i] * margin[i];
      loss += softplus(-ym);
      weights[i] = -labels[i] / (1.0 + std::exp(ym));
    }
    const double f = inv_m * loss + 0.5 * mu * x.squaredNorm();
    Eigen::VectorXd g = inv_m * (A.transpose() * weights) + mu * x;
    return {f, g};
  };
  auto value = [value_grad](const Eigen::VectorXd& x) { return value_grad(x).first; };
  auto grad = [value_grad](const Eigen::VectorXd& x) { return value_grad(x).second; };

  return ProblemOracle(features, value, grad, meta, nullptr, nullptr, value_grad);
}

ProblemOracle make_nnls(const NnlsSpec& spec) { return make_nnls_with_truth(spec).first; }

std::pair<ProblemOracle, Eigen::VectorXd> make_nnls_with_truth(const NnlsSpec& spec) {
  if (spec.samples_M < 1 || spec.features_n < 1)
    throw std::invalid_argument("make_nnls: dimensions must be >= 1");
  if (spec.samples_M < spec.features_n)
    throw std::invalid_argument("make_nnls: samples_M must be >= features_n");
  if (!(spec.sparsity_p > 0.0 && spec.sparsity_p < 1.0))
    throw std::invalid_argument("make_nnls: sparsity_p must be in (0, 1)");
  if (!(spec.singular_low > 0.0 && spec.singular_low <= spec.singular_high))
    throw std::invalid_argument("make_nnls: invalid singular range");
  if (spec.regularization_mu < 0.0 || spec.noise_sigma < 0.0)
    throw std::invalid_argument("make_nnls: mu and noise_sigma must be >= 0");

  const int m = spec.samples_M;
  const int n = spec.features_n;
  Rng rng(spec.seed);

  // A = U diag(sv) V^T with random orthogonal factors and log-spaced spectrum
  // scaled by sqrt(M), so (1/M) A^T A has top eigenvalue singular_high^2.
  Eigen::MatrixXd U;
  {
    Eigen::MatrixXd G = rng.normal_matrix(m, n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    U = qr.householderQ() * Eigen::MatrixXd::Identity(m, n);
  }
  Eigen::MatrixXd V;
  {
    Eigen::MatrixXd G = rng.normal_matrix(n, n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    V = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  }
  Eigen::VectorXd sv(n);
  {
    const double l0 = std::log10(spec.singular_low);
    const double l1 = std::log10(spec.singular_high);
    for (int i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      sv[i] = std::pow(10.0, l0 + (l1 - l0) * t) * std::sqrt(static_cast<double>(m));
    }
  }
  Eigen::MatrixXd A = U * sv.asDiagonal() * V.transpose();

  Eigen::VectorXd x_true = Eigen::VectorXd::Zero(n);
  {
    const int support = std::max(1, static_cast<int>(std::lround(spec.sparsity_p * n)));
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < support; ++i) {  // partial Fisher-Yates
      const int j = i + static_cast<int>(rng.below(n - i));
      std::swap(pool[i], pool[j]);
      x_true[pool[i]] = rng.uniform(1.0, 2.0);
    }
  }
  Eigen::VectorXd b = A * x_true;
  if (spec.noise_sigma > 0.0) b += spec.noise_sigma * rng.normal_vector(m);

  const double mu = spec.regularization_mu;
  ProblemMetadata meta;
  meta.lipschitz_L = spec.singular_high * spec.singular_high + 2.0 * mu;
  meta.strong_convexity_mu = spec.singular_low * spec.singular_low + 2.0 * mu;
  meta.condition_kappa = spec.singular_high / spec.singular_low;

  const double inv_m = 1.0 / m;
  auto value_grad = [A, b, mu, inv_m](const Eigen::VectorXd& x)
      -> std::pair<double, Eigen::VectorXd> {
    Eigen::VectorXd res = A * x - b;
    const double f = 0.5 * inv_m * res.squaredNorm() + mu * x.squaredNorm();
    Eigen::VectorXd g = inv_m * (A.transpose() * res) + 2.0 * mu * x;
    return {f, g};
  };
  auto value = [value_grad](const Eigen::VectorXd& x) { return value_grad(x).first; };
  auto grad = [value_grad](const Eigen::VectorXd& x) { return value_grad(x).second; };
  auto project = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return x.cwiseMax(0.0);
  };

  return {ProblemOracle(n, value, grad, meta, nullptr, project, value_grad), x_true};
}

Eigen::VectorXd fixed_point_map(const ProblemOracle& problem, const Eigen::VectorXd& x,
                                double beta) {
  if (beta <= 0.0) throw std::invalid_argument("fixed_point_map: beta must be > 0");
  Eigen::VectorXd step = x - beta * problem.gradient(x);
  return problem.has_projector() ? problem.projector(step) : step;
}

Eigen::VectorXd residual(const ProblemOracle& problem, const Eigen::VectorXd& x,
                         double beta) {
  if (beta <= 0.0) throw std::invalid_argument("residual: beta must be > 0");
  if (problem.has_projector())
    return problem.projector(x - beta * problem.gradient(x)) - x;
  return -beta * problem.gradient(x);  // exact, avoids cancellation against x
}

// --- serialization -----------------------------------------------------------

ProblemOracle make_problem(const ProblemSpec& spec) {
  return std::visit(
      [](const auto& s) -> ProblemOracle {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, QuadraticSpec>)
          return make_quadratic(s.n, s.kappa, s.spacing);
        else if constexpr (std::is_same_v<T, RosenbrockSpec>)
          return make_rosenbrock(s.a);
        else if constexpr (std::is_same_v<T, LogisticSpec>)
          return make_logistic(s.samples, s.features, s.mu, s.seed);
        else
          return make_nnls(s);
      },
      spec);
}

std::string problem_kind(const ProblemSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, QuadraticSpec>) return "quadratic";
        else if constexpr (std::is_same_v<T, RosenbrockSpec>) return "rosenbrock";
        else if constexpr (std::is_same_v<T, LogisticSpec>) return "logistic";
        else return "nnls";
      },
      spec);
}

nlohmann::ordered_json problem_spec_to_json(const ProblemSpec& spec) {
  nlohmann::ordered_json j;
  j["kind"] = problem_kind(spec);
  std::visit(
      [&j](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, QuadraticSpec>) {
          j["n"] = s.n;
          j["kappa"] = s.kappa;
          j["spacing"] = s.spacing;
        } else if constexpr (std::is_same_v<T, RosenbrockSpec>) {
          j["a"] = s.a;
        } else if constexpr (std::is_same_v<T, LogisticSpec>) {
          j["samples"] = s.samples;
          j["features"] = s.features;
          j["mu"] = s.mu;
          j["seed"] = s.seed;
        } else {
          j["samples_M"] = s.samples_M;
          j["features_n"] = s.features_n;
          j["regularization_mu"] = s.regularization_mu;
          j["sparsity_p"] = s.sparsity_p;
          j["noise_sigma"] = s.noise_sigma;
          j["singular_low"] = s.singular_low;
          j["singular_high"] = s.singular_high;
          j["seed"] = s.seed;
        }
      },
      spec);
  return j;
}

ProblemSpec problem_spec_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "quadratic") {
    QuadraticSpec s;
    s.n = j.at("n").get<int>();
    s.kappa = j.at("kappa").get<double>();
    s.spacing = j.value("spacing", std::string("uniform"));
    return s;
  }
  if (kind == "rosenbrock") {
    RosenbrockSpec s;
    s.a = j.at("a").get<double>();
    return s;
  }
  if (kind == "logistic") {
    LogisticSpec s;
    s.samples = j.at("samples").get<int>();
    s.features = j.at("features").get<int>();
    s.mu = j.at("mu").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
  }
  if (kind == "nnls") {
    NnlsSpec s;
    s.samples_M = j.at("samples_M").get<int>();
    s.features_n = j.at("features_n").get<int>();
    s.regularization_mu = j.at("regularization_mu").get<double>();
    s.sparsity_p = j.at("sparsity_p").get<double>();
    s.noise_sigma = j.at("noise_sigma").get<double>();
    s.singular_low = j.at("singular_low").get<double>();
    s.singular_high = j.at("singular_high").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
  }
  throw std::invalid_argument("problem_spec_from_json: unknown kind '" + kind + "'");
}

ProblemSpec with_seed(ProblemSpec spec, std::uint64_t seed) {
  std::visit(
      [seed](auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LogisticSpec> || std::is_same_v<T, NnlsSpec>)
          s.seed = seed;
      },
      spec);
  return spec;
}

}  // namespace egaa
