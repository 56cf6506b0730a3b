#include "csa/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csa/error.hpp"

namespace csa {

double CsaParams::max_weight() const noexcept {
  double w = 1.0;
  for (double b : beta) w = std::max(w, b);
  return w;
}

double CsaParams::min_weight() const noexcept {
  double w = 1.0;
  for (double b : beta) w = std::min(w, b);
  return w;
}

void CsaParams::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw ContractViolation("interaction radius must be positive");
  if (!(volume > 0.0) || !std::isfinite(volume))
    throw ContractViolation("domain volume must be positive");
  if (dim < 1 || dim > kMaxDim) throw ContractViolation("dimension must be 1, 2 or 3");
  for (std::size_t j = 0; j < beta.size(); ++j)
    if (!(beta[j] > 0.0) || !std::isfinite(beta[j]))
      throw ContractViolation("beta_" + std::to_string(j + 1) + " must be positive and finite");
}

}  // namespace csa
