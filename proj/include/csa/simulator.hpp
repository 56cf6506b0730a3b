#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csa/coverage.hpp"
#include "csa/params.hpp"
#include "csa/rng.hpp"
#include "csa/trajectory.hpp"

namespace csa {

// Either a target number of accepted points or "run until jamming".
struct StopRule {
  std::optional<std::size_t> count;

  static StopRule at_count(std::size_t n) { return {n}; }
  static StopRule until_jamming() { return {}; }
};

struct PointSequence {
  CsaParams params;
  bool beta_known = true;             // false when read from a file without beta
  std::vector<Point> points;          // acceptance order
  std::vector<int> insertion_counts;  // n(X_i, X(i-1)); empty when not recorded
  std::optional<std::uint64_t> seed;
  std::string generator;
  double resolution = 0.0;            // grid resolution used for jamming detection
  bool jammed = false;
  bool shortfall = false;             // stopped by jamming before the requested count

  std::size_t size() const noexcept { return points.size(); }
};

struct SimulationOptions {
  double resolution = 0.0;  // 0 selects R / 50
  // Switch from whole-domain proposals to candidate-cell proposals once the
  // admissible area drops below this fraction of the domain.
  double candidate_switch_fraction = 0.05;
  std::uint64_t rejection_guard = 10'000'000;
};

// Draws accepted points from the conditional density
//   psi(x) = beta_{n(x)} / integral of beta_{n(y)} dy
// by rejection: propose uniformly, accept with probability beta_n / beta_max.
// Proposals are uniform on the whole domain while much of it is admissible,
// then uniform on the union of grid cells that may still contain an
// admissible point (cells with fewer than N+1 points inside the radius shrunk
// by the cell half-diagonal). Both proposal sets cover the support of psi,
// so the law of the accepted point is exact in either phase.
class NextPointSampler {
 public:
  explicit NextPointSampler(const SimulationOptions& options = {}) : options_(options) {}

  // Returns nullopt when the field is jammed.
  std::optional<Point> draw(const CoverageField& field, const CsaParams& params, Rng& rng);

  bool using_candidates() const noexcept { return candidate_mode_; }
  std::uint64_t proposals() const noexcept { return proposals_; }

 private:
  void rebuild(const CoverageField& field, const CsaParams& params);

  SimulationOptions options_;
  bool candidate_mode_ = false;
  std::vector<std::uint32_t> candidates_;
  std::uint64_t since_rebuild_ = 0;
  std::uint64_t proposals_ = 0;
};

PointSequence simulate(const CsaParams& params, StopRule stop, std::uint64_t seed,
                       const SimulationOptions& options = {});

struct Simulation {
  PointSequence sequence;
  Trajectory trajectory;
};

// Simulates and records the sufficient statistics in the same pass; the
// trajectory equals replay(sequence, params.order(), resolution).
Simulation simulate_with_trajectory(const CsaParams& params, StopRule stop, std::uint64_t seed,
                                    const SimulationOptions& options = {});

// Grid-normalised conditional density of the next accepted point at x.
// Throws DegenerateDensity when the configuration is jammed.
double acceptance_density(const CoverageField& field, const CsaParams& params, const Point& x);

}  // namespace csa
