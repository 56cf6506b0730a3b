#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

namespace csa {

inline constexpr int kMaxDim = 3;

// A point of R^d, d in {1, 2, 3}.
class Point {
 public:
  Point() = default;
  Point(std::initializer_list<double> coords);
  explicit Point(std::span<const double> coords);

  int dim() const noexcept { return dim_; }
  double operator[](int axis) const noexcept { return c_[axis]; }
  double& operator[](int axis) noexcept { return c_[axis]; }
  std::span<const double> coords() const noexcept { return {c_.data(), std::size_t(dim_)}; }

  bool operator==(const Point& other) const = default;

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

[[noreturn]] void throw_dim_mismatch(int expected, int actual);

// Throws ContractViolation unless p.dim() == dim.
inline void require_dim(const Point& p, int dim) {
  if (p.dim() != dim) throw_dim_mismatch(dim, p.dim());
}

// Squared Euclidean distance, summed in axis order. Every radius test in the
// project goes through this function so that grid and point counts agree
// bit for bit. Throws ContractViolation when the dimensions differ.
inline double distance_squared(const Point& a, const Point& b) {
  require_dim(b, a.dim());
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double distance(const Point& a, const Point& b);

// Cube of volume m centred at the origin, side m^(1/d).
class Domain {
 public:
  Domain(int dim, double volume);

  int dim() const noexcept { return dim_; }
  double volume() const noexcept { return volume_; }
  double side() const noexcept { return side_; }
  double half_side() const noexcept { return 0.5 * side_; }

  bool contains(const Point& p) const;

  bool operator==(const Domain& other) const = default;

 private:
  int dim_;
  double volume_;
  double side_;
};

// Number of config points y with |x - y| <= radius (inclusive).
std::size_t neighbor_count(const Point& x, std::span<const Point> config, double radius);

// Exact minimum over all pairs; +infinity for fewer than two points.
double min_pairwise_distance(std::span<const Point> points);

// Uniform bucket grid over a Domain. With cell edge >= query radius a query
// touches only the 3^d cells around the query point.
class SpatialIndex {
 public:
  SpatialIndex(const Domain& domain, double cell_size);

  void insert(std::uint32_t id, const Point& p);
  std::size_t count_within(const Point& x, double radius) const;

  std::size_t size() const noexcept { return size_; }
  double cell_edge() const noexcept { return edge_; }
  int cells_per_axis() const noexcept { return cells_; }
  const Domain& domain() const noexcept { return domain_; }

  // Calls f(id, point) for every indexed point within radius of x.
  template <class F>
  void for_each_within(const Point& x, double radius, F&& f) const;

 private:
  struct Entry {
    std::uint32_t id;
    Point p;
  };

  int axis_cell(double coord) const;
  std::size_t flat(const std::array<int, kMaxDim>& cell) const;

  Domain domain_;
  double edge_;
  int cells_;
  std::vector<std::vector<Entry>> buckets_;
  std::size_t size_ = 0;
};

template <class F>
void SpatialIndex::for_each_within(const Point& x, double radius, F&& f) const {
  require_dim(x, domain_.dim());
  const int d = domain_.dim();
  const double r2 = radius * radius;
  std::array<int, kMaxDim> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < d; ++a) {
    lo[a] = axis_cell(x[a] - radius);
    hi[a] = axis_cell(x[a] + radius);
  }
  std::array<int, kMaxDim> c{0, 0, 0};
  for (c[2] = lo[2]; c[2] <= hi[2]; ++c[2])
    for (c[1] = lo[1]; c[1] <= hi[1]; ++c[1])
      for (c[0] = lo[0]; c[0] <= hi[0]; ++c[0])
        for (const Entry& e : buckets_[flat(c)])
          if (distance_squared(x, e.p) <= r2) f(e.id, e.p);
}

}  // namespace csa
