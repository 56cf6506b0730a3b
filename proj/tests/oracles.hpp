#pragma once

// Independent reference computations used by the tests. Each is a slow,
// direct transcription of a definition; none reuses the code it checks
// beyond the shared distance function.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "csa/geometry.hpp"
#include "csa/likelihood.hpp"
#include "csa/params.hpp"
#include "csa/rng.hpp"
#include "csa/simulator.hpp"
#include "csa/trajectory.hpp"

namespace oracle {

inline std::size_t brute_count(const csa::Point& x, const std::vector<csa::Point>& pts,
                               std::size_t prefix, double radius) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < prefix; ++i)
    if (csa::distance_squared(x, pts[i]) <= radius * radius) ++n;
  return n;
}

// Insertion counts n(X_i, X(i-1)) by a quadratic prefix scan.
inline std::vector<int> insertion_counts(const std::vector<csa::Point>& pts, double radius) {
  std::vector<int> xi;
  for (std::size_t i = 0; i < pts.size(); ++i) xi.push_back(int(brute_count(pts[i], pts, i, radius)));
  return xi;
}

// Gamma_{j,k} for every prefix k by scanning every cell centre against every
// point of the prefix. Rows are k = 0..l, entries j = 0..order.
inline std::vector<std::vector<double>> brute_gamma_path(const std::vector<csa::Point>& pts,
                                                         const csa::Domain& domain, double radius,
                                                         double h, int order) {
  const int d = domain.dim();
  const auto cells = std::size_t(std::max(1.0, std::round(domain.side() / h)));
  const double edge = domain.side() / double(cells);
  const double measure = std::pow(edge, d);
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= cells;
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k <= pts.size(); ++k) {
    std::vector<double> row(std::size_t(order) + 1, 0.0);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::vector<double> c(static_cast<std::size_t>(d));
      std::size_t rest = flat;
      for (int a = 0; a < d; ++a) {
        c[std::size_t(a)] = -0.5 * domain.side() + (double(rest % cells) + 0.5) * edge;
        rest /= cells;
      }
      const std::size_t n = brute_count(csa::Point(c), pts, k, radius);
      if (n <= std::size_t(order)) row[n] += measure;
    }
    rows.push_back(row);
  }
  return rows;
}

// Five-point central differences with step `rel` * |x_i|.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double rel = 1e-3) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel * std::abs(x[i]);
    auto at = [&](double s) {
      Eigen::VectorXd y = x;
      y[i] += s * h;
      return f(y);
    };
    g[i] = (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
  }
  return g;
}

inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double rel = 1e-3) {
  const auto n = x.size();
  Eigen::MatrixXd jac(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = rel * std::abs(x[i]);
    auto at = [&](double s) {
      Eigen::VectorXd y = x;
      y[i] += s * h;
      return f(y);
    };
    jac.col(i) = (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
  }
  return jac;
}

inline double loglik(const csa::Trajectory& t, const Eigen::VectorXd& beta) {
  return csa::log_likelihood(t, csa::BetaVector({beta.data(), beta.data() + beta.size()})).value;
}

// Root of a decreasing function on [lo, hi] by bisection to absolute width tol.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Determinant by Doolittle LU with partial pivoting.
inline double lu_determinant(Eigen::MatrixXd a) {
  const auto n = a.rows();
  double det = 1.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index p = c;
    for (Eigen::Index r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    if (a(p, c) == 0.0) return 0.0;
    if (p != c) {
      a.row(p).swap(a.row(c));
      det = -det;
    }
    det *= a(c, c);
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      a.row(r).tail(n - c) -= f * a.row(c).tail(n - c);
    }
  }
  return det;
}

// Lens area of two disks of radius r at centre distance s < 2r.
inline double lens_area(double r, double s) {
  return 2 * r * r * std::acos(s / (2 * r)) - 0.5 * s * std::sqrt(4 * r * r - s * s);
}

// A small simulated trajectory with a coarse grid, for derivative and
// optimiser checks.
inline csa::Simulation small_run(std::uint64_t seed, int order, std::size_t length,
                                 double radius = 0.08) {
  csa::Rng rng(seed, 99);
  csa::CsaParams p;
  p.radius = radius;
  for (int j = 0; j < order; ++j) p.beta.push_back(std::exp(rng.uniform(0.0, std::log(50.0))));
  csa::SimulationOptions opts;
  opts.resolution = radius / 10.0;
  return csa::simulate_with_trajectory(p, csa::StopRule::at_count(length), seed, opts);
}

}  // namespace oracle
