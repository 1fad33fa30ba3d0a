#include "egaa/mixing.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace egaa {

namespace {

MixingCoefficients svd_solve(const Eigen::VectorXd& rhs, const Eigen::MatrixXd& M,
                             double lambda, const char* who) {
  if (lambda < 0.0) throw std::invalid_argument(std::string(who) + ": lambda must be >= 0");
  if (!rhs.allFinite() || !M.allFinite())
    throw std::invalid_argument(std::string(who) + ": non-finite inputs");

  MixingCoefficients out;
  out.lambda_used = lambda;
  if (M.cols() == 0) {
    out.theta.resize(0);
    return out;
  }
  if (M.rows() != rhs.size())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s[0] <= 0.0 || !s.allFinite()) {
    out.theta = Eigen::VectorXd::Zero(M.cols());  // degenerate history
    return out;
  }

  Eigen::VectorXd coeffs = svd.matrixU().transpose() * rhs;
  if (lambda > 0.0) {
    for (Eigen::Index i = 0; i < s.size(); ++i)
      coeffs[i] *= s[i] / (s[i] * s[i] + lambda);
  } else {
    // Minimum-norm solution: drop directions below the numerical rank.
    const double tol = std::max(M.rows(), M.cols()) *
                       std::numeric_limits<double>::epsilon() * s[0];
    for (Eigen::Index i = 0; i < s.size(); ++i)
      coeffs[i] = s[i] > tol ? coeffs[i] / s[i] : 0.0;
  }
  out.theta = svd.matrixV() * coeffs;
  return out;
}

}  // namespace

MixingCoefficients solve_type2(const Eigen::VectorXd& r, const Eigen::MatrixXd& R,
                               double lambda) {
  return svd_solve(r, R, lambda, "solve_type2");
}

MixingCoefficients solve_type1(const Eigen::VectorXd& dx_target, const Eigen::MatrixXd& X,
                               double lambda) {
  return svd_solve(dx_target, X, lambda, "solve_type1");
}

MomentumCoefficients theta_to_gamma(const Eigen::VectorXd& theta) {
  if (!theta.allFinite()) throw std::invalid_argument("theta_to_gamma: non-finite theta");
  const Eigen::Index m = theta.size();
  MomentumCoefficients out;
  out.gamma.resize(m);
  auto th = [&theta, m](Eigen::Index i) {  // theta_0 = theta_{m+1} = 0
    return (i >= 1 && i <= m) ? theta[i - 1] : 0.0;
  };
  for (Eigen::Index j = 1; j <= m; ++j) out.gamma[j - 1] = th(m - j) - th(m - j + 1);
  return out;
}

MixingCoefficients gamma_to_theta(const Eigen::VectorXd& gamma) {
  if (!gamma.allFinite()) throw std::invalid_argument("gamma_to_theta: non-finite gamma");
  const Eigen::Index m = gamma.size();
  MixingCoefficients out;
  out.theta.resize(m);
  double tail = 0.0;  // sum_{j >= i} gamma^(j), accumulated from i = m down
  for (Eigen::Index i = m; i >= 1; --i) {
    tail += gamma[i - 1];
    out.theta[m - i] = -tail;  // theta_{m-i+1}
  }
  return out;
}

double effective_mass(const Eigen::VectorXd& gamma) {
  double second_moment = 0.0;
  for (Eigen::Index j = 1; j <= gamma.size(); ++j)
    second_moment += static_cast<double>(j) * static_cast<double>(j) * gamma[j - 1];
  return 0.5 * (1.0 + second_moment);
}

std::pair<double, double> consistency_deviation(const Eigen::VectorXd& gamma, double h) {
  if (h <= 0.0) throw std::invalid_argument("consistency_deviation: h must be > 0");
  double sum = 0.0;
  for (Eigen::Index j = 1; j <= gamma.size(); ++j)
    sum += static_cast<double>(j) * gamma[j - 1];
  return {sum, (1.0 - sum) / std::sqrt(h)};
}

double gain_factor(const Eigen::VectorXd& grad, const Eigen::MatrixXd& R, double lambda) {
  const double gnorm = grad.norm();
  if (gnorm == 0.0) throw std::domain_error("gain_factor: zero gradient (converged)");
  if (R.cols() == 0) return 1.0;
  // Pi grad = grad - R theta(grad); reuses the regularized solve so the
  // n x n projector is never materialized.
  const MixingCoefficients mc = svd_solve(grad, R, lambda, "gain_factor");
  return (grad - R * mc.theta).norm() / gnorm;
}

}  // namespace egaa
