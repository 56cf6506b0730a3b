#include "csa/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csa/error.hpp"

namespace csa::kernels {

namespace {

constexpr std::size_t kBlock = 1024;

class StepAccumulator {
 public:
  StepAccumulator(std::size_t order, Terms terms)
      : n_(order),
        terms_(terms),
        over_z_(terms != Terms::Value ? n_ : 0),
        outer_(terms == Terms::Hessian ? n_ * n_ : 0) {}

  void add_step(std::span<const double> row, std::span<const double> beta) {
    double z = row[0];
    for (std::size_t j = 0; j < n_; ++j) z += beta[j] * row[j + 1];
    if (!(z > 0.0)) {
      feasible_ = false;
      return;
    }
    log_z_.add(std::log(z));
    if (terms_ == Terms::Value) return;
    const double inv = 1.0 / z;
    for (std::size_t i = 0; i < n_; ++i) over_z_[i].add(row[i + 1] * inv);
    if (terms_ != Terms::Hessian) return;
    const double inv2 = inv * inv;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) outer_[i * n_ + j].add(row[i + 1] * row[j + 1] * inv2);
  }

  void merge(const StepAccumulator& other) {
    feasible_ = feasible_ && other.feasible_;
    log_z_.add(other.log_z_);
    for (std::size_t i = 0; i < over_z_.size(); ++i) over_z_[i].add(other.over_z_[i]);
    for (std::size_t i = 0; i < outer_.size(); ++i) outer_[i].add(other.outer_[i]);
  }

  LikelihoodSums result() const {
    LikelihoodSums s;
    s.feasible = feasible_;
    s.log_z = log_z_.value();
    s.gamma_over_z.reserve(over_z_.size());
    for (const auto& c : over_z_) s.gamma_over_z.push_back(c.value());
    s.gamma_outer.reserve(outer_.size());
    for (const auto& c : outer_) s.gamma_outer.push_back(c.value());
    return s;
  }

 private:
  std::size_t n_;
  Terms terms_;
  bool feasible_ = true;
  CompensatedSum log_z_;
  std::vector<CompensatedSum> over_z_;
  std::vector<CompensatedSum> outer_;
};

void check_beta(const Trajectory& traj, std::span<const double> beta) {
  if (beta.size() != std::size_t(traj.order))
    throw ContractViolation("beta has " + std::to_string(beta.size()) +
                            " entries, trajectory order is " + std::to_string(traj.order));
}

}  // namespace

namespace serial {

LikelihoodSums likelihood_sums(const Trajectory& traj, std::span<const double> beta, Terms terms) {
  check_beta(traj, beta);
  StepAccumulator acc(beta.size(), terms);
  for (std::size_t k = 0; k < traj.length; ++k) acc.add_step(traj.gamma_row(k), beta);
  return acc.result();
}

double min_pairwise_distance(std::span<const Point> points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      best = std::min(best, distance_squared(points[i], points[j]));
  return std::sqrt(best);
}

void neighbor_counts(std::span<const Point> queries, std::span<const Point> config, double radius,
                     std::span<std::size_t> out) {
  for (std::size_t q = 0; q < queries.size(); ++q)
    out[q] = neighbor_count(queries[q], config, radius);
}

}  // namespace serial

namespace parallel {

LikelihoodSums likelihood_sums(const Trajectory& traj, std::span<const double> beta, Terms terms) {
  check_beta(traj, beta);
  const std::size_t blocks = (traj.length + kBlock - 1) / kBlock;
  std::vector<StepAccumulator> partial(blocks, StepAccumulator(beta.size(), terms));
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t end = std::min(traj.length, (b + 1) * kBlock);
    for (std::size_t k = b * kBlock; k < end; ++k) partial[b].add_step(traj.gamma_row(k), beta);
  }
  StepAccumulator total(beta.size(), terms);
  for (const auto& p : partial) total.merge(p);
  return total.result();
}

double min_pairwise_distance(std::span<const Point> points) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = points.size();
#pragma omp parallel for schedule(dynamic, 64) reduction(min : best)
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      best = std::min(best, distance_squared(points[i], points[j]));
  return std::sqrt(best);
}

void neighbor_counts(std::span<const Point> queries, std::span<const Point> config, double radius,
                     std::span<std::size_t> out) {
  if (!(radius > 0.0)) throw ContractViolation("interaction radius must be positive");
  const std::size_t n = queries.size();
#pragma omp parallel for schedule(static)
  for (std::size_t q = 0; q < n; ++q) out[q] = neighbor_count(queries[q], config, radius);
}

}  // namespace parallel

}  // namespace csa::kernels
