#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "csa/coverage.hpp"

namespace csa {

// Sufficient statistics of an observed sequence of length l under order N.
//
// gamma_path holds, for k = 0..l-1, the row (Gamma_{0,k}, ..., Gamma_{N,k}) of
// areas with exactly j neighbours among the first k points, stored row-major.
// gamma_final is the same row after all l points.
struct Trajectory {
  std::size_t length = 0;
  int order = 0;
  double radius = 0.0;
  double resolution = 0.0;  // actual cell edge of the quadrature grid
  double volume = 0.0;
  int dim = 2;

  std::vector<std::size_t> t;       // t_0..t_N
  std::vector<int> xi_path;         // insertion count of point i
  std::vector<double> gamma_path;   // length * (order + 1)
  std::vector<double> gamma_final;  // order + 1

  std::size_t width() const noexcept { return std::size_t(order) + 1; }
  std::span<const double> gamma_row(std::size_t k) const {
    return {gamma_path.data() + k * width(), width()};
  }
  double gamma(int j, std::size_t k) const { return gamma_path[k * width() + std::size_t(j)]; }
};

// Builds a Trajectory while points are inserted into a CoverageField.
class TrajectoryRecorder {
 public:
  TrajectoryRecorder(const CoverageField& field, int order);

  // Call with the field state *before* the point is added.
  void before_insert(const CoverageField& field, int insertion_count);
  Trajectory finish(const CoverageField& field) &&;

 private:
  Trajectory traj_;
};

}  // namespace csa
