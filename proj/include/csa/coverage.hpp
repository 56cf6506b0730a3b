#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "csa/geometry.hpp"
#include "csa/params.hpp"

namespace csa {

// Areas Gamma_0..Gamma_N of the regions with exactly j neighbours. `overflow`
// is the area with more than N neighbours, so sum(values) + overflow = m.
struct GammaVector {
  std::vector<double> values;
  double overflow = 0.0;

  int order() const noexcept { return static_cast<int>(values.size()) - 1; }
  double operator[](std::size_t j) const { return values[j]; }
};

// Neighbour-count field u -> n(u, config) sampled at the centres of a regular
// grid over the domain (midpoint quadrature). The grid has round(side / h)
// cells per axis; the actual cell edge is side / cells so the cells tile the
// domain exactly and the tallies always sum to m.
//
// The field also indexes the inserted points, so continuous neighbour counts
// for arbitrary locations are available next to the gridded ones.
class CoverageField {
 public:
  CoverageField(const Domain& domain, double radius, double resolution);

  static double default_resolution(double radius) noexcept { return radius / 50.0; }

  const Domain& domain() const noexcept { return domain_; }
  double radius() const noexcept { return radius_; }
  double cell_edge() const noexcept { return edge_; }
  double cell_measure() const noexcept { return measure_; }
  std::size_t cells_per_axis() const noexcept { return cells_; }
  std::size_t cell_count() const noexcept { return counts_.size(); }

  // Increments every cell whose centre lies within the radius of x.
  void add_point(const Point& x);

  std::size_t point_count() const noexcept { return points_.size(); }
  std::span<const Point> points() const noexcept { return points_; }

  // Continuous n(x, inserted points).
  std::size_t neighbor_count(const Point& x) const { return index_.count_within(x, radius_); }
  // Number of inserted points within `radius` of x (any radius).
  std::size_t count_within(const Point& x, double radius) const {
    return index_.count_within(x, radius);
  }

  Point cell_center(std::size_t flat) const;
  std::size_t cell_of(const Point& x) const;
  std::uint32_t count_at(std::size_t flat) const noexcept { return counts_[flat]; }

  // tally()[j] = number of cells whose count is exactly j.
  std::span<const std::uint64_t> tally() const noexcept { return tally_; }
  std::uint64_t cells_with_count(std::size_t j) const noexcept {
    return j < tally_.size() ? tally_[j] : 0;
  }
  double gamma(std::size_t j) const noexcept { return measure_ * double(cells_with_count(j)); }

  GammaVector gamma_stats(int order) const;

  // Area of cells with a positive acceptance weight: sum over j <= N of Gamma_j.
  double admissible_area(const CsaParams& params) const;
  // Grid version of the integral of beta_{n(u)} over the domain.
  double weighted_area(const CsaParams& params) const;

  // Jamming: less than one cell of admissible area left.
  bool jammed(const CsaParams& params) const { return admissible_area(params) < measure_; }

 private:
  double axis_center(std::size_t i) const noexcept {
    return -domain_.half_side() + (double(i) + 0.5) * edge_;
  }
  void bump(std::size_t flat);

  Domain domain_;
  double radius_;
  std::size_t cells_;
  double edge_;
  double measure_;
  std::vector<std::uint16_t> counts_;
  std::vector<std::uint64_t> tally_;
  std::vector<Point> points_;
  SpatialIndex index_;
};

}  // namespace csa
