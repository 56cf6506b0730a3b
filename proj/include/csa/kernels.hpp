#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial
// reference used by the tests and an OpenMP version used by the library.
// The OpenMP versions reduce in a fixed block order, so their results do not
// depend on the thread count.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "csa/geometry.hpp"
#include "csa/trajectory.hpp"

namespace csa::kernels {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  void add(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

enum class Terms { Value, Gradient, Hessian };

// Step sums of the likelihood at beta (beta_1..beta_N, entries may be zero):
//   log_z        = sum_k log Z_k,  Z_k = Gamma_{0,k} + sum_j beta_j Gamma_{j,k}
//   gamma_over_z = sum_k Gamma_{i,k} / Z_k                    (i = 1..N)
//   gamma_outer  = sum_k Gamma_{i,k} Gamma_{j,k} / Z_k^2      (row-major N x N)
// `feasible` is false when some Z_k <= 0; the sums are then meaningless.
struct LikelihoodSums {
  double log_z = 0.0;
  std::vector<double> gamma_over_z;
  std::vector<double> gamma_outer;
  bool feasible = true;
};

namespace serial {
LikelihoodSums likelihood_sums(const Trajectory& traj, std::span<const double> beta, Terms terms);
double min_pairwise_distance(std::span<const Point> points);
void neighbor_counts(std::span<const Point> queries, std::span<const Point> config, double radius,
                     std::span<std::size_t> out);
}  // namespace serial

namespace parallel {
LikelihoodSums likelihood_sums(const Trajectory& traj, std::span<const double> beta, Terms terms);
double min_pairwise_distance(std::span<const Point> points);
void neighbor_counts(std::span<const Point> queries, std::span<const Point> config, double radius,
                     std::span<std::size_t> out);
}  // namespace parallel

}  // namespace csa::kernels
