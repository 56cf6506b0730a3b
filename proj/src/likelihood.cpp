#include "csa/likelihood.hpp"

#include <cmath>
#include <string>

#include "csa/error.hpp"
#include "csa/kernels.hpp"

namespace csa {

namespace {

double t_log_beta(const Trajectory& traj, std::span<const double> beta) {
  kernels::CompensatedSum s;
  for (std::size_t i = 0; i < beta.size(); ++i)
    if (traj.t[i + 1] > 0) s.add(double(traj.t[i + 1]) * std::log(beta[i]));
  return s.value();
}

kernels::LikelihoodSums feasible_sums(const Trajectory& traj, const BetaVector& beta,
                                      kernels::Terms terms) {
  auto sums = kernels::parallel::likelihood_sums(traj, beta.values(), terms);
  if (!sums.feasible)
    throw DegenerateDensity("a likelihood denominator vanished: the trajectory reaches jamming");
  return sums;
}

}  // namespace

BetaVector::BetaVector(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t j = 0; j < values_.size(); ++j)
    if (!(values_[j] > 0.0) || !std::isfinite(values_[j]))
      throw ContractViolation("beta_" + std::to_string(j + 1) + " must be positive and finite");
}

BetaVector BetaVector::from_log(const Eigen::VectorXd& theta) {
  std::vector<double> v(std::size_t(theta.size()));
  for (Eigen::Index i = 0; i < theta.size(); ++i) v[std::size_t(i)] = std::exp(theta[i]);
  return BetaVector(std::move(v));
}

Eigen::VectorXd BetaVector::as_eigen() const {
  return Eigen::Map<const Eigen::VectorXd>(values_.data(), Eigen::Index(values_.size()));
}

LogLikelihood log_likelihood(const Trajectory& traj, const BetaVector& beta) {
  const auto sums = kernels::parallel::likelihood_sums(traj, beta.values(), kernels::Terms::Value);
  if (!sums.feasible) return LogLikelihood::infeasible();
  return {t_log_beta(traj, beta.values()) - sums.log_z, true};
}

Eigen::VectorXd score(const Trajectory& traj, const BetaVector& beta) {
  const auto sums = feasible_sums(traj, beta, kernels::Terms::Gradient);
  Eigen::VectorXd g(Eigen::Index(beta.size()));
  for (std::size_t i = 0; i < beta.size(); ++i)
    g[Eigen::Index(i)] = double(traj.t[i + 1]) / beta[i] - sums.gamma_over_z[i];
  return g;
}

ScoreReport score_report(const Trajectory& traj, const BetaVector& beta) {
  ScoreReport r;
  r.gradient = score(traj, beta);
  r.denominators.reserve(traj.length);
  for (std::size_t k = 0; k < traj.length; ++k) {
    const auto row = traj.gamma_row(k);
    double z = row[0];
    for (std::size_t j = 0; j < beta.size(); ++j) z += beta[j] * row[j + 1];
    r.denominators.push_back(z);
  }
  return r;
}

Eigen::MatrixXd observed_information(const Trajectory& traj, const BetaVector& beta) {
  return evaluate(traj, beta).information;
}

LikelihoodState evaluate(const Trajectory& traj, const BetaVector& beta) {
  const auto sums = kernels::parallel::likelihood_sums(traj, beta.values(), kernels::Terms::Hessian);
  if (!sums.feasible)
    throw DegenerateDensity("a likelihood denominator vanished: the trajectory reaches jamming");
  const auto n = Eigen::Index(beta.size());
  LikelihoodState s;
  s.loglik = {t_log_beta(traj, beta.values()) - sums.log_z, true};
  s.score.resize(n);
  s.information.resize(n, n);
  s.log_hessian.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double bi = beta[std::size_t(i)];
    const double ti = double(traj.t[std::size_t(i) + 1]);
    s.score[i] = ti / bi - sums.gamma_over_z[std::size_t(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      const double outer = sums.gamma_outer[std::size_t(i * n + j)];
      const double bj = beta[std::size_t(j)];
      s.information(i, j) = (i == j ? ti / (bi * bi) : 0.0) - outer;
      s.log_hessian(i, j) = bi * bj * outer - (i == j ? bi * sums.gamma_over_z[std::size_t(i)] : 0.0);
    }
  }
  return s;
}

LogLikelihood log_likelihood_at_boundary(const Trajectory& traj, std::span<const double> beta) {
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (!(beta[j] >= 0.0) || !std::isfinite(beta[j]))
      throw ContractViolation("boundary beta entries must be non-negative and finite");
    if (beta[j] == 0.0 && traj.t[j + 1] > 0) return LogLikelihood::infeasible();
  }
  const auto sums = kernels::parallel::likelihood_sums(traj, beta, kernels::Terms::Value);
  if (!sums.feasible) return LogLikelihood::infeasible();
  return {t_log_beta(traj, beta) - sums.log_z, true};
}

}  // namespace csa
