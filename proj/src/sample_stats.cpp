#include "csa/sample_stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "csa/error.hpp"
#include "csa/estimator.hpp"

namespace csa::stats {

double mean(std::span<const double> x) {
  if (x.empty()) throw ContractViolation("mean of an empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / double(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw ContractViolation("variance needs two observations");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / double(x.size() - 1);
}

namespace {

double central_moment(std::span<const double> x, int k) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += std::pow(v - m, k);
  return s / double(x.size());
}

}  // namespace

double skewness(std::span<const double> x) {
  const double m2 = central_moment(x, 2);
  return central_moment(x, 3) / std::pow(m2, 1.5);
}

double excess_kurtosis(std::span<const double> x) {
  const double m2 = central_moment(x, 2);
  return central_moment(x, 4) / (m2 * m2) - 3.0;
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& samples) {
  if (samples.rows() < 2) throw ContractViolation("covariance needs two observations");
  const Eigen::RowVectorXd mu = samples.colwise().mean();
  const Eigen::MatrixXd centred = samples.rowwise() - mu;
  return centred.transpose() * centred / double(samples.rows() - 1);
}

double ks_statistic_normal(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double n = double(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = normal_cdf(s[i]);
    d = std::max({d, double(i + 1) / n - f, f - double(i) / n});
  }
  return d;
}

double kolmogorov_pvalue(double statistic, std::size_t n) {
  const double rn = std::sqrt(double(n));
  const double lambda = (rn + 0.12 + 0.11 / rn) * statistic;
  if (lambda < 0.2) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

double ks_pvalue_normal(std::span<const double> x) {
  return kolmogorov_pvalue(ks_statistic_normal(x), x.size());
}

std::vector<double> studentize(std::span<const double> x) {
  const double m = mean(x);
  const double sd = std::sqrt(variance(x));
  std::vector<double> z;
  z.reserve(x.size());
  for (double v : x) z.push_back((v - m) / sd);
  return z;
}

double chi_square_pvalue(double statistic, double dof) {
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

}  // namespace csa::stats
