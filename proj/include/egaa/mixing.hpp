#pragma once

#include <limits>
#include <utility>

#include <Eigen/Core>

namespace egaa {

struct MixingCoefficients {
  Eigen::VectorXd theta;  // ordered like the columns of R_k, oldest first
  double lambda_used = 0.0;
};

struct MomentumCoefficients {
  Eigen::VectorXd gamma;  // gamma[j-1] is the coefficient of lag j
};

/// Per-step diagnostics of the AA family. NaN where not applicable.
struct StepDiagnostics {
  double effective_mass_M = std::numeric_limits<double>::quiet_NaN();
  double delta_M = std::numeric_limits<double>::quiet_NaN();
  double guard_rho = std::numeric_limits<double>::quiet_NaN();
  double consistency_sum = std::numeric_limits<double>::quiet_NaN();
  double damping_c = std::numeric_limits<double>::quiet_NaN();
  double gain_delta = std::numeric_limits<double>::quiet_NaN();
  double realized_contraction = std::numeric_limits<double>::quiet_NaN();
};

/// Tikhonov-regularized residual least squares
///   min_theta ||r - R theta||^2 + lambda ||theta||^2,
/// solved through the SVD of R. lambda = 0 yields the minimum-norm solution
/// on rank-deficient systems. Throws on non-finite inputs.
MixingCoefficients solve_type2(const Eigen::VectorXd& r, const Eigen::MatrixXd& R,
                               double lambda);

/// Same solve against the iterate-increment matrix X (Type-I variant).
MixingCoefficients solve_type1(const Eigen::VectorXd& dx_target, const Eigen::MatrixXd& X,
                               double lambda);

/// Triangular transform of mixing coefficients into multi-step momentum
/// coefficients: gamma^(j) = theta_{m-j} - theta_{m-j+1} with theta_0 =
/// theta_{m+1} = 0.
MomentumCoefficients theta_to_gamma(const Eigen::VectorXd& theta);

/// Inverse transform, theta_{m-i+1} = -sum_{j>=i} gamma^(j).
MixingCoefficients gamma_to_theta(const Eigen::VectorXd& gamma);

/// Effective mass 1/2 (1 + sum_j j^2 gamma^(j)).
double effective_mass(const Eigen::VectorXd& gamma);

/// Kinematic consistency sum S = sum_j j gamma^(j) and the induced damping
/// coefficient c = (1 - S) / sqrt(h). Requires h > 0.
std::pair<double, double> consistency_deviation(const Eigen::VectorXd& gamma, double h);

/// Acceleration gain factor ||Pi grad|| / ||grad|| with
/// Pi = I - R (R^T R + lambda I)^{-1} R^T, evaluated through the small
/// least-squares solve. Returns 1 for an empty history. Throws
/// std::domain_error on a zero gradient.
double gain_factor(const Eigen::VectorXd& grad, const Eigen::MatrixXd& R, double lambda);

}  // namespace egaa
