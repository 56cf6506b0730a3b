#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "csa/trajectory.hpp"

namespace csa {

// beta_1..beta_N, all strictly positive and finite (beta_0 = 1 is implicit).
class BetaVector {
 public:
  BetaVector() = default;
  explicit BetaVector(std::vector<double> values);
  static BetaVector from_log(const Eigen::VectorXd& theta);

  std::size_t size() const noexcept { return values_.size(); }
  // Zero-based: operator[](0) is beta_1.
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  Eigen::VectorXd as_eigen() const;

  bool operator==(const BetaVector&) const = default;

 private:
  std::vector<double> values_;
};

// A log-likelihood that may be -infinity. Infeasible means the likelihood is
// exactly zero (some denominator Z_k vanished, or beta_j = 0 while t_j > 0).
struct LogLikelihood {
  double value = 0.0;
  bool feasible = true;

  static LogLikelihood infeasible() { return {0.0, false}; }
  bool operator<(const LogLikelihood& other) const {
    if (!feasible) return other.feasible;
    return other.feasible && value < other.value;
  }
};

struct ScoreReport {
  Eigen::VectorXd gradient;
  std::vector<double> denominators;  // Z_k = Gamma_{0,k} + sum_j beta_j Gamma_{j,k}
};

// l(beta) = sum_k t_k log beta_k - sum_k log Z_{k-1}.
LogLikelihood log_likelihood(const Trajectory& traj, const BetaVector& beta);

// d l / d beta_i = t_i / beta_i - sum_k Gamma_{i,k} / Z_k.
// Throws DegenerateDensity on an infeasible trajectory.
Eigen::VectorXd score(const Trajectory& traj, const BetaVector& beta);
ScoreReport score_report(const Trajectory& traj, const BetaVector& beta);

// Negative Hessian: delta_ij t_i / beta_i^2 - sum_k Gamma_i Gamma_j / Z_k^2.
Eigen::MatrixXd observed_information(const Trajectory& traj, const BetaVector& beta);

// Everything the optimiser needs from one pass over the trajectory.
// log_hessian is the Hessian of l in theta = log beta, which is negative
// semidefinite: -sum_k (diag(p_k) - p_k p_k^T), p_{k,i} = beta_i Gamma_{i,k} / Z_k.
struct LikelihoodState {
  LogLikelihood loglik;
  Eigen::VectorXd score;
  Eigen::MatrixXd information;
  Eigen::MatrixXd log_hessian;
};
LikelihoodState evaluate(const Trajectory& traj, const BetaVector& beta);

// Boundary diagnostic: the log-likelihood with some beta_j allowed to be zero.
LogLikelihood log_likelihood_at_boundary(const Trajectory& traj, std::span<const double> beta);

}  // namespace csa
