#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace csa::stats {

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased
double skewness(std::span<const double> x);
double excess_kurtosis(std::span<const double> x);

// Rows are observations. Unbiased sample covariance.
Eigen::MatrixXd covariance(const Eigen::MatrixXd& samples);

// One-sample Kolmogorov-Smirnov statistic against the standard normal and its
// asymptotic p-value (Stephens' finite-sample correction).
double ks_statistic_normal(std::span<const double> x);
double kolmogorov_pvalue(double statistic, std::size_t n);
double ks_pvalue_normal(std::span<const double> x);

// (x - mean) / sd.
std::vector<double> studentize(std::span<const double> x);

// Upper tail of the chi-square distribution.
double chi_square_pvalue(double statistic, double dof);

}  // namespace csa::stats
