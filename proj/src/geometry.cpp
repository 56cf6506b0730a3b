#include "csa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csa/error.hpp"
#include "csa/kernels.hpp"

namespace csa {

Point::Point(std::initializer_list<double> coords) : Point(std::span<const double>(coords)) {}

Point::Point(std::span<const double> coords) : dim_(static_cast<int>(coords.size())) {
  if (coords.empty() || coords.size() > std::size_t(kMaxDim))
    throw ContractViolation("point dimension must be 1, 2 or 3, got " +
                            std::to_string(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (!std::isfinite(coords[i])) throw ContractViolation("non-finite point coordinate");
    c_[i] = coords[i];
  }
}

void throw_dim_mismatch(int expected, int actual) {
  throw ContractViolation("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                          std::to_string(actual));
}

double distance(const Point& a, const Point& b) { return std::sqrt(distance_squared(a, b)); }

Domain::Domain(int dim, double volume) : dim_(dim), volume_(volume) {
  if (dim < 1 || dim > kMaxDim) throw ContractViolation("domain dimension must be 1, 2 or 3");
  if (!(volume > 0.0) || !std::isfinite(volume))
    throw ContractViolation("domain volume must be positive and finite");
  side_ = dim == 1 ? volume : (dim == 2 ? std::sqrt(volume) : std::cbrt(volume));
}

bool Domain::contains(const Point& p) const {
  require_dim(p, dim_);
  const double h = half_side();
  for (int i = 0; i < dim_; ++i)
    if (p[i] < -h || p[i] > h) return false;
  return true;
}

std::size_t neighbor_count(const Point& x, std::span<const Point> config, double radius) {
  if (!(radius > 0.0)) throw ContractViolation("interaction radius must be positive");
  const double r2 = radius * radius;
  std::size_t n = 0;
  for (const Point& y : config)
    if (distance_squared(x, y) <= r2) ++n;
  return n;
}

double min_pairwise_distance(std::span<const Point> points) {
  return kernels::parallel::min_pairwise_distance(points);
}

SpatialIndex::SpatialIndex(const Domain& domain, double cell_size) : domain_(domain) {
  if (!(cell_size > 0.0)) throw ContractViolation("index cell size must be positive");
  cells_ = std::max(1, static_cast<int>(std::floor(domain.side() / cell_size)));
  edge_ = domain.side() / cells_;
  std::size_t total = 1;
  for (int a = 0; a < domain.dim(); ++a) total *= std::size_t(cells_);
  buckets_.resize(total);
}

int SpatialIndex::axis_cell(double coord) const {
  const double u = (coord + domain_.half_side()) / edge_;
  if (!(u > 0.0)) return 0;
  return std::min(cells_ - 1, static_cast<int>(u));
}

std::size_t SpatialIndex::flat(const std::array<int, kMaxDim>& cell) const {
  return (std::size_t(cell[2]) * cells_ + std::size_t(cell[1])) * cells_ + std::size_t(cell[0]);
}

void SpatialIndex::insert(std::uint32_t id, const Point& p) {
  require_dim(p, domain_.dim());
  std::array<int, kMaxDim> c{0, 0, 0};
  for (int a = 0; a < domain_.dim(); ++a) c[a] = axis_cell(p[a]);
  buckets_[flat(c)].push_back({id, p});
  ++size_;
}

std::size_t SpatialIndex::count_within(const Point& x, double radius) const {
  std::size_t n = 0;
  for_each_within(x, radius, [&n](std::uint32_t, const Point&) { ++n; });
  return n;
}

}  // namespace csa
