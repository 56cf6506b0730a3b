#pragma once

// Monte Carlo and matrix checks of the large-domain behaviour of the
// estimator: limit curves of the Gamma- and t-statistics, the limit Fisher
// information, the martingale structure of the score, and the normality of
// the score and of the MLE.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csa/likelihood.hpp"
#include "csa/params.hpp"
#include "csa/trajectory.hpp"

namespace csa {

struct ExperimentConfig {
  CsaParams params;  // params.volume is the domain volume m
  double density = 0.0;  // mu, points per unit volume
  std::size_t replications = 100;
  std::uint64_t seed = 1;
  int nodes = 64;
  int jobs = 0;  // worker threads; 0 = OpenMP default, 1 = serial loop
  double resolution = 0.0;  // 0 = R / 50
  int pilot_runs = 1;
  double max_jam_fraction = 0.8;
  std::optional<double> jam_density;  // skips the pilot when set
};

// Empirical jamming density: mean point count at jamming divided by m.
double pilot_jamming_density(const CsaParams& params, int runs, std::uint64_t seed,
                             double resolution = 0.0, int jobs = 0);

// Per-replication averages of Gamma_{j,k}/m and t_{j,k}/m at k = round(i l / (nodes-1)),
// l = floor(mu m). lambda holds the realised abscissae k / m.
struct LimitCurves {
  CsaParams params;
  double density = 0.0;
  double jam_density = 0.0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::vector<double> lambda;
  std::vector<std::size_t> steps;
  std::vector<std::vector<double>> gamma;  // [node][j], j = 0..N
  std::vector<std::vector<double>> rho;    // [node][j], j = 0..N

  std::size_t node_count() const noexcept { return lambda.size(); }
  int order() const noexcept { return params.order(); }
};

// Node positions k_i for a sequence of length l.
std::vector<std::size_t> curve_steps(std::size_t length, int nodes);

// Accumulates node samples of trajectories into curves.
class CurveAccumulator {
 public:
  CurveAccumulator(const CsaParams& params, std::size_t length, int nodes);
  void add(const Trajectory& traj);
  void merge(const CurveAccumulator& other);
  LimitCurves finish() const;

 private:
  CsaParams params_;
  std::vector<std::size_t> steps_;
  std::vector<std::vector<double>> gamma_sum_;
  std::vector<std::vector<double>> rho_sum_;
  std::size_t count_ = 0;
};

LimitCurves limit_curves(const ExperimentConfig& config);

struct IntegralResiduals {
  std::vector<double> rho;       // rho_j(mu), j = 1..N
  std::vector<double> integral;  // trapezoid of beta_j gamma_j / (gamma_0 + sum beta_i gamma_i)
  std::vector<double> residual;  // |rho - integral|
};

IntegralResiduals check_integral_relation(const LimitCurves& curves, const BetaVector& beta);

// Q_ij = delta_ij gamma_i / (beta_i Z) - gamma_i gamma_j / Z^2, Z = gamma_0 + sum beta_i gamma_i.
// gamma holds gamma_0..gamma_N; all entries must be positive.
Eigen::MatrixXd q_matrix(std::span<const double> beta, std::span<const double> gamma);

struct MinorCheck {
  double closed_form = 0.0;
  double numeric = 0.0;
};

// Leading k x k principal minor of Q: closed form
//   (gamma_0 + sum_{i>k} beta_i gamma_i) / Z^{k+1} * prod_{i<=k} gamma_i / beta_i
// against the LU determinant of the block.
MinorCheck minor_determinant_check(std::span<const double> beta, std::span<const double> gamma,
                                   int k);

struct MinorSweep {
  std::size_t cases = 0;
  std::size_t minors = 0;
  double max_relative_error = 0.0;
  std::size_t cholesky_failures = 0;
};

// Random positive (beta, gamma) with N uniform in 1..max_order, log-uniform
// entries; every leading minor is checked and Q is Cholesky-factorised.
MinorSweep minor_identity_sweep(std::size_t cases, int max_order, std::uint64_t seed);

// Eigenvalues of a b^T, sorted by decreasing modulus.
std::vector<std::complex<double>> rank_one_eigenvalues(std::span<const double> a,
                                                       std::span<const double> b);

// Trapezoidal integral of Q(beta, gamma(lambda)) over the curve nodes with
// lambda <= mu.
Eigen::MatrixXd limit_information(const LimitCurves& curves, const BetaVector& beta, double mu);

struct MartingaleReport {
  Eigen::MatrixXd increments;      // zeta_{k,i}: rows i = 1..l, columns k = 1..N
  Eigen::VectorXd reconstructed;   // column sums of increments
  Eigen::VectorXd score;           // score(traj, beta)
  Eigen::VectorXd max_abs_increment;
  Eigen::VectorXd bound;           // 2 / beta_k
  Eigen::MatrixXd quadratic_variation;  // sum_i zeta_i zeta_i^T

  double max_reconstruction_error() const;
  bool within_bound() const;
};

// xi_{k,i} = 1{n(X_i, X(i-1)) = k}, xibar_{k,i} = beta_k Gamma_{k,i-1} / Z_{i-1},
// zeta_{k,i} = (xi - xibar) / beta_k.
MartingaleReport martingale_mean_check(const Trajectory& traj, const BetaVector& beta);

struct CltReport {
  std::string kind;  // "score" or "mle"
  CsaParams params;
  double density = 0.0;
  double jam_density = 0.0;
  std::size_t length = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;

  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd reference_covariance;
  std::vector<double> skewness;
  std::vector<double> excess_kurtosis;
  std::vector<double> ks_pvalues;             // per studentized component
  std::vector<double> projection_ks_pvalues;  // Cramer-Wold directions

  // score experiment: mean of sum_i zeta_i zeta_i^T / m
  Eigen::MatrixXd mean_quadratic_variation;

  // mle experiment
  std::vector<double> coverage;   // fraction of 95% intervals containing beta0_j
  Eigen::VectorXd variance;       // sample variance of beta_hat (unscaled)
  std::size_t failures = 0;       // fits without an interior root or not converged
  bool unstable = false;          // failures > 5%
  std::vector<double> variance_limit_diagonal;  // 1 / integral of Q_ii
  std::vector<double> variance_limit_eigen;     // 1 / integral of i-th eigenvalue of Q

  // Rows are replications: score/sqrt(m) or sqrt(m)(beta_hat - beta0).
  Eigen::MatrixXd samples;
};

CltReport score_clt_experiment(const ExperimentConfig& config);
CltReport mle_normality_experiment(const ExperimentConfig& config);

// Maximum entrywise |a - b| / |b|.
double max_relative_deviation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace csa
