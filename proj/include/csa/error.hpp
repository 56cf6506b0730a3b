#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace csa {

// Violated precondition (dimension mismatch, non-positive parameter, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid user configuration (grid resolution, stop rule, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An insertion neighbour count larger than the model order N was met during
// replay. The likelihood of such a sequence is zero under order N.
class OrderExceeded : public std::runtime_error {
 public:
  OrderExceeded(std::size_t index, int count, int order)
      : std::runtime_error("point " + std::to_string(index) + " has " + std::to_string(count) +
                           " neighbours at insertion, model order is " + std::to_string(order)),
        index_(index),
        count_(count),
        order_(order) {}

  // Zero-based position of the offending point in acceptance order.
  std::size_t index() const noexcept { return index_; }
  int count() const noexcept { return count_; }
  int order() const noexcept { return order_; }

 private:
  std::size_t index_;
  int count_;
  int order_;
};

// The acceptance density is undefined because no admissible area is left.
class DegenerateDensity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, std::vector<double> last_iterate)
      : std::runtime_error(what), last_iterate_(std::move(last_iterate)) {}
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  std::vector<double> last_iterate_;
};

class SingularInformation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested point density is not reachable before jamming.
class InfeasibleDensity : public std::runtime_error {
 public:
  InfeasibleDensity(double requested, double jam_density)
      : std::runtime_error("requested density " + std::to_string(requested) +
                           " is not below the pilot jamming density " +
                           std::to_string(jam_density)),
        requested_(requested),
        jam_density_(jam_density) {}
  double requested() const noexcept { return requested_; }
  double jam_density() const noexcept { return jam_density_; }

 private:
  double requested_;
  double jam_density_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace csa
