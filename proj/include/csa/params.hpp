#pragma once

#include <cstddef>
#include <vector>

#include "csa/geometry.hpp"

namespace csa {

// Model parameters. beta holds beta_1..beta_N; beta_0 = 1 is implicit and
// beta_j = 0 for j > N. An empty beta is random sequential adsorption.
struct CsaParams {
  double radius = 0.0;
  std::vector<double> beta;
  double volume = 1.0;
  int dim = 2;

  int order() const noexcept { return static_cast<int>(beta.size()); }

  // beta_n, including beta_0 = 1 and zero beyond the order.
  double weight(std::size_t n) const noexcept {
    if (n == 0) return 1.0;
    return n <= beta.size() ? beta[n - 1] : 0.0;
  }

  double max_weight() const noexcept;
  double min_weight() const noexcept;  // over beta_0..beta_N

  Domain domain() const { return Domain(dim, volume); }

  // Throws ContractViolation on a non-positive radius, volume or beta entry.
  void validate() const;
};

}  // namespace csa
