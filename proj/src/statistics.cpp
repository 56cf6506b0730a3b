#include "csa/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "csa/error.hpp"

namespace csa {

Trajectory replay(std::span<const Point> points, const Domain& domain, double radius, int order,
                  double resolution) {
  if (order < 0) throw ContractViolation("model order must be non-negative");
  if (resolution <= 0.0) resolution = CoverageField::default_resolution(radius);
  CoverageField field(domain, radius, resolution);
  TrajectoryRecorder recorder(field, order);
  for (const Point& p : points) {
    if (!domain.contains(p)) throw ContractViolation("replayed point outside the domain");
    recorder.before_insert(field, static_cast<int>(field.neighbor_count(p)));
    field.add_point(p);
  }
  return std::move(recorder).finish(field);
}

Trajectory replay(const PointSequence& seq, std::optional<int> order, double resolution) {
  const int n = order ? *order
                      : (seq.points.empty() ? seq.params.order()
                                            : estimate_order(seq.points, seq.params.radius));
  return replay(seq.points, seq.params.domain(), seq.params.radius, n, resolution);
}

std::vector<std::size_t> t_statistics(const Trajectory& traj) {
  std::vector<std::size_t> t(traj.width(), 0);
  for (int xi : traj.xi_path) ++t[std::size_t(xi)];
  return t;
}

int estimate_order(std::span<const Point> points, double radius) {
  if (points.empty()) throw ContractViolation("estimate_order needs at least one point");
  if (!(radius > 0.0)) throw ContractViolation("interaction radius must be positive");
  // A bounding-box index keeps this linear for large sequences.
  double extent = 0.0;
  for (const Point& p : points)
    for (double c : p.coords()) extent = std::max(extent, std::abs(c));
  const int dim = points.front().dim();
  const double side = 2.0 * extent + radius;
  Domain box(dim, dim == 1 ? side : dim == 2 ? side * side : side * side * side);
  SpatialIndex index(box, radius);
  int best = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    best = std::max(best, static_cast<int>(index.count_within(points[i], radius)));
    index.insert(static_cast<std::uint32_t>(i), points[i]);
  }
  return best;
}

std::vector<int> weakly_identified(const Trajectory& traj, std::size_t threshold) {
  std::vector<int> out;
  for (int j = 1; j <= traj.order; ++j)
    if (traj.t[std::size_t(j)] < threshold) out.push_back(j);
  return out;
}

}  // namespace csa
