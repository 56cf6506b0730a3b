#include "csa/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "csa/error.hpp"

namespace csa {

namespace {

constexpr std::size_t kMaxCells = std::size_t(1) << 32;

}  // namespace

CoverageField::CoverageField(const Domain& domain, double radius, double resolution)
    : domain_(domain), radius_(radius), index_(domain, radius > 0.0 ? radius : 1.0) {
  if (!(radius > 0.0)) throw ContractViolation("interaction radius must be positive");
  if (!(resolution > 0.0) || resolution > radius)
    throw ConfigError("grid resolution must lie in (0, R], got " + std::to_string(resolution));
  const double per_axis = std::max(1.0, std::round(domain.side() / resolution));
  const double total = std::pow(per_axis, domain.dim());
  if (total > double(kMaxCells))
    throw ConfigError("coverage grid would need " + std::to_string(total) +
                      " cells; use a coarser resolution");
  cells_ = static_cast<std::size_t>(per_axis);
  edge_ = domain.side() / per_axis;
  measure_ = std::pow(edge_, domain.dim());
  counts_.assign(static_cast<std::size_t>(total), 0);
  tally_.assign(1, counts_.size());
}

void CoverageField::bump(std::size_t flat) {
  std::uint16_t c = counts_[flat];
  if (c == std::numeric_limits<std::uint16_t>::max())
    throw ConfigError("coverage count overflow");
  --tally_[c];
  ++c;
  if (tally_.size() <= c) tally_.push_back(0);
  ++tally_[c];
  counts_[flat] = c;
}

void CoverageField::add_point(const Point& x) {
  require_dim(x, domain_.dim());
  if (!domain_.contains(x)) throw ContractViolation("point outside the domain");

  const double r2 = radius_ * radius_;
  const double half = domain_.half_side();
  const long last = static_cast<long>(cells_) - 1;
  // Index range of cell centres within `reach` of c along one axis, widened by
  // one cell on each side; the exact test below decides membership.
  auto range = [&](double c, double reach, long& lo, long& hi) {
    lo = std::max(0L, static_cast<long>(std::ceil((c - reach + half) / edge_ - 0.5)) - 1);
    hi = std::min(last, static_cast<long>(std::floor((c + reach + half) / edge_ - 0.5)) + 1);
  };
  auto reach_after = [&](double used) { return std::sqrt(std::max(0.0, r2 - used)); };

  Point centre = x;
  const std::size_t n = cells_;
  long lo0, hi0, lo1, hi1, lo2, hi2;
  switch (domain_.dim()) {
    case 1:
      range(x[0], radius_, lo0, hi0);
      for (long i = lo0; i <= hi0; ++i) {
        centre[0] = axis_center(i);
        if (distance_squared(centre, x) <= r2) bump(i);
      }
      break;
    case 2:
      range(x[1], radius_, lo1, hi1);
      for (long j = lo1; j <= hi1; ++j) {
        centre[1] = axis_center(j);
        const double dy = centre[1] - x[1];
        range(x[0], reach_after(dy * dy), lo0, hi0);
        for (long i = lo0; i <= hi0; ++i) {
          centre[0] = axis_center(i);
          if (distance_squared(centre, x) <= r2) bump(std::size_t(j) * n + i);
        }
      }
      break;
    default:
      range(x[2], radius_, lo2, hi2);
      for (long k = lo2; k <= hi2; ++k) {
        centre[2] = axis_center(k);
        const double dz = centre[2] - x[2];
        range(x[1], reach_after(dz * dz), lo1, hi1);
        for (long j = lo1; j <= hi1; ++j) {
          centre[1] = axis_center(j);
          const double dy = centre[1] - x[1];
          range(x[0], reach_after(dz * dz + dy * dy), lo0, hi0);
          for (long i = lo0; i <= hi0; ++i) {
            centre[0] = axis_center(i);
            if (distance_squared(centre, x) <= r2) bump((std::size_t(k) * n + j) * n + i);
          }
        }
      }
      break;
  }
  index_.insert(static_cast<std::uint32_t>(points_.size()), x);
  points_.push_back(x);
}

Point CoverageField::cell_center(std::size_t flat) const {
  Point c = domain_.dim() == 1 ? Point{0.0} : domain_.dim() == 2 ? Point{0.0, 0.0} : Point{0.0, 0.0, 0.0};
  for (int a = 0; a < domain_.dim(); ++a) {
    c[a] = axis_center(flat % cells_);
    flat /= cells_;
  }
  return c;
}

std::size_t CoverageField::cell_of(const Point& x) const {
  require_dim(x, domain_.dim());
  std::size_t flat = 0;
  for (int a = domain_.dim() - 1; a >= 0; --a) {
    const double u = (x[a] + domain_.half_side()) / edge_;
    const std::size_t i = u > 0.0 ? std::min(cells_ - 1, static_cast<std::size_t>(u)) : 0;
    flat = flat * cells_ + i;
  }
  return flat;
}

GammaVector CoverageField::gamma_stats(int order) const {
  if (order < 0) throw ContractViolation("truncation order must be non-negative");
  GammaVector g;
  g.values.resize(std::size_t(order) + 1);
  std::uint64_t above = 0;
  for (std::size_t j = 0; j < tally_.size(); ++j) {
    if (j <= std::size_t(order))
      g.values[j] = measure_ * double(tally_[j]);
    else
      above += tally_[j];
  }
  g.overflow = measure_ * double(above);
  return g;
}

double CoverageField::admissible_area(const CsaParams& params) const {
  std::uint64_t cells = 0;
  for (std::size_t j = 0; j < tally_.size(); ++j)
    if (params.weight(j) > 0.0) cells += tally_[j];
  return measure_ * double(cells);
}

double CoverageField::weighted_area(const CsaParams& params) const {
  double total = 0.0;
  for (std::size_t j = 0; j < tally_.size(); ++j) total += params.weight(j) * gamma(j);
  return total;
}

}  // namespace csa
