#include "csa/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "csa/error.hpp"

namespace csa {

namespace {

struct Draw {
  Point point;
  int neighbors;
};

Point proposal_in_box(const Point& lower_corner, double edge, Rng& rng) {
  Point p = lower_corner;
  for (int a = 0; a < p.dim(); ++a) p[a] = lower_corner[a] + edge * rng.uniform();
  return p;
}

Point corner_point(int dim, double value) {
  return dim == 1 ? Point{value} : dim == 2 ? Point{value, value} : Point{value, value, value};
}

std::optional<Draw> draw_next(NextPointSampler& sampler, const CoverageField& field,
                              const CsaParams& params, Rng& rng) {
  const auto p = sampler.draw(field, params, rng);
  if (!p) return std::nullopt;
  return Draw{*p, static_cast<int>(field.neighbor_count(*p))};
}

PointSequence run(const CsaParams& params, StopRule stop, std::uint64_t seed,
                  const SimulationOptions& options, Trajectory* trajectory) {
  params.validate();
  const double h = options.resolution > 0.0 ? options.resolution
                                            : CoverageField::default_resolution(params.radius);
  CoverageField field(params.domain(), params.radius, h);
  Rng rng(seed);
  NextPointSampler sampler(options);
  std::optional<TrajectoryRecorder> recorder;
  if (trajectory) recorder.emplace(field, params.order());

  PointSequence seq;
  seq.params = params;
  seq.seed = seed;
  seq.generator = std::string(kGeneratorVersion);
  seq.resolution = h;
  if (stop.count) {
    seq.points.reserve(*stop.count);
    seq.insertion_counts.reserve(*stop.count);
  }

  while (!stop.count || seq.points.size() < *stop.count) {
    const auto next = draw_next(sampler, field, params, rng);
    if (!next) {
      seq.jammed = true;
      seq.shortfall = stop.count.has_value();
      break;
    }
    if (recorder) recorder->before_insert(field, next->neighbors);
    field.add_point(next->point);
    seq.points.push_back(next->point);
    seq.insertion_counts.push_back(next->neighbors);
  }
  if (!seq.jammed) seq.jammed = field.jammed(params);
  if (trajectory) *trajectory = std::move(*recorder).finish(field);
  return seq;
}

}  // namespace

std::optional<Point> NextPointSampler::draw(const CoverageField& field, const CsaParams& params,
                                            Rng& rng) {
  if (field.jammed(params)) return std::nullopt;
  if (!candidate_mode_ && field.admissible_area(params) <
                              options_.candidate_switch_fraction * field.domain().volume()) {
    candidate_mode_ = true;
    rebuild(field, params);
  }

  const int dim = field.domain().dim();
  const double half = field.domain().half_side();
  const double edge = field.cell_edge();
  const double wmax = params.max_weight();
  const Point domain_corner = corner_point(dim, -half);
  std::uint64_t streak = 0;
  for (;;) {
    Point y;
    if (candidate_mode_) {
      const std::uint32_t cell = candidates_[rng.below(candidates_.size())];
      Point corner = field.cell_center(cell);
      for (int a = 0; a < dim; ++a) corner[a] -= 0.5 * edge;
      y = proposal_in_box(corner, edge, rng);
      for (int a = 0; a < dim; ++a) y[a] = std::clamp(y[a], -half, half);
    } else {
      y = proposal_in_box(domain_corner, 2.0 * half, rng);
    }
    ++proposals_;
    ++since_rebuild_;
    const double w = params.weight(field.neighbor_count(y));
    if (w > 0.0 && rng.uniform() * wmax < w) return y;

    ++streak;
    if (candidate_mode_ &&
        since_rebuild_ >= std::max<std::uint64_t>(4096, 2 * candidates_.size()))
      rebuild(field, params);
    if (streak % options_.rejection_guard == 0) {
      if (field.jammed(params)) return std::nullopt;
      if (!candidate_mode_) {
        candidate_mode_ = true;
        rebuild(field, params);
      }
    }
  }
}

void NextPointSampler::rebuild(const CoverageField& field, const CsaParams& params) {
  const std::uint32_t order = static_cast<std::uint32_t>(params.order());
  const double shrunk =
      field.radius() - 0.5 * field.cell_edge() * std::sqrt(double(field.domain().dim()));
  // Points within `shrunk` of a cell centre are within R of the whole cell.
  auto may_hold_admissible = [&](std::uint32_t cell) {
    if (field.count_at(cell) <= order) return true;
    if (!(shrunk > 0.0)) return true;
    return field.count_within(field.cell_center(cell), shrunk) <= order;
  };

  if (candidates_.empty()) {
    for (std::size_t c = 0; c < field.cell_count(); ++c)
      if (may_hold_admissible(static_cast<std::uint32_t>(c)))
        candidates_.push_back(static_cast<std::uint32_t>(c));
  } else {
    std::erase_if(candidates_, [&](std::uint32_t c) { return !may_hold_admissible(c); });
  }
  since_rebuild_ = 0;
}

PointSequence simulate(const CsaParams& params, StopRule stop, std::uint64_t seed,
                       const SimulationOptions& options) {
  return run(params, stop, seed, options, nullptr);
}

Simulation simulate_with_trajectory(const CsaParams& params, StopRule stop, std::uint64_t seed,
                                    const SimulationOptions& options) {
  Simulation out;
  out.sequence = run(params, stop, seed, options, &out.trajectory);
  return out;
}

double acceptance_density(const CoverageField& field, const CsaParams& params, const Point& x) {
  if (!field.domain().contains(x)) throw ContractViolation("point outside the domain");
  const double denominator = field.weighted_area(params);
  if (denominator < field.cell_measure() * params.min_weight())
    throw DegenerateDensity("no admissible area left: the configuration is jammed");
  return params.weight(field.neighbor_count(x)) / denominator;
}

TrajectoryRecorder::TrajectoryRecorder(const CoverageField& field, int order) {
  if (order < 0) throw ContractViolation("model order must be non-negative");
  traj_.order = order;
  traj_.radius = field.radius();
  traj_.resolution = field.cell_edge();
  traj_.volume = field.domain().volume();
  traj_.dim = field.domain().dim();
  traj_.t.assign(std::size_t(order) + 1, 0);
}

void TrajectoryRecorder::before_insert(const CoverageField& field, int insertion_count) {
  if (insertion_count > traj_.order)
    throw OrderExceeded(traj_.length, insertion_count, traj_.order);
  for (int j = 0; j <= traj_.order; ++j) traj_.gamma_path.push_back(field.gamma(std::size_t(j)));
  traj_.xi_path.push_back(insertion_count);
  ++traj_.t[std::size_t(insertion_count)];
  ++traj_.length;
}

Trajectory TrajectoryRecorder::finish(const CoverageField& field) && {
  traj_.gamma_final.resize(traj_.width());
  for (int j = 0; j <= traj_.order; ++j) traj_.gamma_final[std::size_t(j)] = field.gamma(std::size_t(j));
  return std::move(traj_);
}

}  // namespace csa
