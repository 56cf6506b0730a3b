#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "csa/geometry.hpp"
#include "csa/simulator.hpp"
#include "csa/trajectory.hpp"

namespace csa {

// Replays points in acceptance order through a fresh CoverageField and
// records t- and Gamma-statistics. Throws OrderExceeded when some insertion
// count is larger than `order`, and ContractViolation for points outside the
// domain.
Trajectory replay(std::span<const Point> points, const Domain& domain, double radius, int order,
                  double resolution);

// Replays a sequence with the model order defaulting to estimate_order() and
// the resolution to R / 50.
Trajectory replay(const PointSequence& seq, std::optional<int> order = std::nullopt,
                  double resolution = 0.0);

std::vector<std::size_t> t_statistics(const Trajectory& traj);

// max_i n(X_i, X(i-1)): the smallest model order under which the sequence has
// positive likelihood.
int estimate_order(std::span<const Point> points, double radius);

// Orders j in 1..N with t_j below `threshold`; beta_j is weakly identified there.
std::vector<int> weakly_identified(const Trajectory& traj, std::size_t threshold = 5);

}  // namespace csa
