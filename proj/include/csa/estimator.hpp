#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "csa/likelihood.hpp"
#include "csa/trajectory.hpp"

namespace csa {

struct FitOptions {
  double tol = 1e-8;  // on the sup norm of the score in beta
  int max_iter = 100;
  std::optional<std::vector<double>> init;  // default: beta_j = 1
  double drift_limit = 30.0;                // |log beta_j| beyond this means no interior root
};

enum class Existence { Interior, BoundaryZero, Divergent };

struct MleResult {
  BetaVector beta_hat;
  Eigen::MatrixXd information;  // observed information at beta_hat
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  double log_likelihood = 0.0;
  Existence existence = Existence::Interior;
  int existence_component = 0;  // 1-based j for BoundaryZero / Divergent
};

// Damped Newton on theta = log beta. The log-likelihood is concave in theta,
// so halving line searches on l(theta) converge to the unique root when it
// exists. When some theta_j runs past +-drift_limit the root does not exist:
// the result has converged = false and the drift direction as diagnostic.
// Throws NonConvergence when max_iter is exhausted without either outcome.
MleResult fit_mle(const Trajectory& traj, const FitOptions& options = {});

// z quantile of the standard normal at 0.975.
inline constexpr double kZ975 = 1.959964;

// Standard normal quantile, Wichura's AS 241 (PPND16), relative accuracy
// about 1e-16 on (0, 1).
double normal_quantile(double p);
double normal_cdf(double x);

struct ConfidenceIntervals {
  double level = 0.95;
  std::vector<double> estimate;
  std::vector<double> std_error;
  std::vector<std::pair<double, double>> bounds;

  bool contains(std::size_t j, double value) const {
    return bounds[j].first <= value && value <= bounds[j].second;
  }
};

// beta_hat_j +- z_{(1+level)/2} sqrt((J^-1)_jj). Throws SingularInformation
// when the information matrix cannot be inverted, ContractViolation when the
// fit did not converge or level is outside (0, 1).
ConfidenceIntervals confidence_intervals(const MleResult& result, double level = 0.95);

std::string describe(Existence e, int component);

}  // namespace csa
