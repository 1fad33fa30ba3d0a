#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include <Eigen/Core>
#include <json.hpp>

namespace egaa {

struct ProblemMetadata {
  std::optional<double> lipschitz_L;
  std::optional<double> strong_convexity_mu;
  std::optional<double> condition_kappa;
  std::optional<double> hessian_lipschitz_LH;
  std::optional<double> minimizer_value_fstar;
};

/// First-order oracle: objective value, gradient, Hessian-vector product and
/// an optional feasibility projector. The default hvp is a central finite
/// difference of the gradient; the default projector is the identity.
/// Oracles are immutable after construction and safe to evaluate concurrently.
class ProblemOracle {
 public:
  using ValueFn = std::function<double(const Eigen::VectorXd&)>;
  using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using ValueGradFn =
      std::function<std::pair<double, Eigen::VectorXd>(const Eigen::VectorXd&)>;
  using HvpFn =
      std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;
  using ProjFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  ProblemOracle(int dimension, ValueFn value, GradFn gradient, ProblemMetadata metadata,
                HvpFn hvp = nullptr, ProjFn projector = nullptr,
                ValueGradFn value_and_gradient = nullptr);

  int dimension() const { return dimension_; }
  const ProblemMetadata& metadata() const { return metadata_; }
  bool has_projector() const { return static_cast<bool>(projector_); }

  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  std::pair<double, Eigen::VectorXd> value_and_gradient(const Eigen::VectorXd& x) const;
  Eigen::VectorXd hvp(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const;
  Eigen::VectorXd projector(const Eigen::VectorXd& x) const;

 private:
  void check_dim(const Eigen::VectorXd& x) const;

  int dimension_;
  ValueFn value_;
  GradFn gradient_;
  ValueGradFn value_grad_;
  HvpFn hvp_;
  ProjFn projector_;
  ProblemMetadata metadata_;
};

/// Generator parameters for the non-negative least squares instance.
/// Singular values are log-spaced in [singular_low, singular_high] and
/// scaled by sqrt(samples_M); the planted solution has a sparse support of
/// fraction sparsity_p with entries uniform in [1, 2].
struct NnlsSpec {
  int samples_M = 2000;
  int features_n = 500;
  double regularization_mu = 5e-4;
  double sparsity_p = 0.005;
  double noise_sigma = 0.5;
  double singular_low = 1e-4;
  double singular_high = 1.0;
  std::uint64_t seed = 0;
};

/// f(x) = 1/2 x^T A x with A diagonal, eigenvalues linearly spaced in [1, kappa].
ProblemOracle make_quadratic(int n, double kappa, const std::string& spacing = "uniform");

/// f(x) = (1 - x1)^2 + a (x2 - x1^2)^2.
ProblemOracle make_rosenbrock(double a);

/// Regularized logistic loss on a synthetic Gaussian dataset with labels from
/// a planted separator and 5% flip noise.
ProblemOracle make_logistic(int samples, int features, double mu, std::uint64_t seed);

/// Constrained least squares f(x) = 1/(2M) ||Ax - b||^2 + mu ||x||^2, x >= 0,
/// with an ill-conditioned SVD-constructed design matrix.
ProblemOracle make_nnls(const NnlsSpec& spec);

/// Same instance plus the planted solution, for recovery checks.
std::pair<ProblemOracle, Eigen::VectorXd> make_nnls_with_truth(const NnlsSpec& spec);

/// One application of the gradient-descent fixed-point map,
/// projector(x - beta * grad f(x)).
Eigen::VectorXd fixed_point_map(const ProblemOracle& problem, const Eigen::VectorXd& x,
                                double beta);

/// Residual of the fixed-point map, fixed_point_map(x) - x. Equals
/// -beta * grad f(x) when the projector is the identity.
Eigen::VectorXd residual(const ProblemOracle& problem, const Eigen::VectorXd& x,
                         double beta);

// --- serializable problem configurations -----------------------------------

struct QuadraticSpec {
  int n = 100;
  double kappa = 50.0;
  std::string spacing = "uniform";
  bool operator==(const QuadraticSpec&) const = default;
};
struct RosenbrockSpec {
  double a = 100.0;
  bool operator==(const RosenbrockSpec&) const = default;
};
struct LogisticSpec {
  int samples = 500;
  int features = 100;
  double mu = 1e-3;
  std::uint64_t seed = 7;
  bool operator==(const LogisticSpec&) const = default;
};
inline bool operator==(const NnlsSpec& a, const NnlsSpec& b) {
  return a.samples_M == b.samples_M && a.features_n == b.features_n &&
         a.regularization_mu == b.regularization_mu && a.sparsity_p == b.sparsity_p &&
         a.noise_sigma == b.noise_sigma && a.singular_low == b.singular_low &&
         a.singular_high == b.singular_high && a.seed == b.seed;
}

using ProblemSpec = std::variant<QuadraticSpec, RosenbrockSpec, LogisticSpec, NnlsSpec>;

ProblemOracle make_problem(const ProblemSpec& spec);
std::string problem_kind(const ProblemSpec& spec);

nlohmann::ordered_json problem_spec_to_json(const ProblemSpec& spec);
ProblemSpec problem_spec_from_json(const nlohmann::json& j);

/// Overrides every seed field present in the spec (used by the CLI --seed flag).
ProblemSpec with_seed(ProblemSpec spec, std::uint64_t seed);

}  // namespace egaa
