#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "csa/coverage.hpp"
#include "csa/error.hpp"
#include "csa/rng.hpp"
#include "oracles.hpp"

using namespace csa;

namespace {

double tally_area(const CoverageField& f) {
  double cells = 0.0;
  for (auto c : f.tally()) cells += double(c);
  return cells * f.cell_measure();
}

}  // namespace

TEST_SUITE("coverage") {
  TEST_CASE("empty field: Gamma_0 = m") {
    const CoverageField f(Domain(2, 4.0), 0.1, 0.01);
    const GammaVector g = f.gamma_stats(2);
    CHECK(g[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(g[1] == 0.0);
    CHECK(g[2] == 0.0);
    CHECK(g.overflow == 0.0);
  }

  TEST_CASE("cell count is the product of round(side / h)") {
    const CoverageField f(Domain(2, 1.0), 0.1, 0.0030);
    CHECK(f.cells_per_axis() == 333);
    CHECK(f.cell_count() == 333u * 333u);
    const CoverageField g(Domain(3, 8.0), 0.5, 0.1);
    CHECK(g.cell_count() == 20u * 20u * 20u);
  }

  TEST_CASE("resolution must lie in (0, R]") {
    CHECK_THROWS_AS(CoverageField(Domain(2, 1.0), 0.1, 0.0), ConfigError);
    CHECK_THROWS_AS(CoverageField(Domain(2, 1.0), 0.1, -0.01), ConfigError);
    CHECK_THROWS_AS(CoverageField(Domain(2, 1.0), 0.1, 0.11), ConfigError);
    CHECK_NOTHROW(CoverageField(Domain(2, 1.0), 0.1, 0.1));
  }

  TEST_CASE("points outside the domain are rejected") {
    CoverageField f(Domain(2, 1.0), 0.1, 0.01);
    CHECK_THROWS_AS(f.add_point(Point({0.6, 0.0})), ContractViolation);
    CHECK_THROWS_AS(f.add_point(Point({0.0, 0.0, 0.0})), ContractViolation);
  }

  TEST_CASE("single interior disk: Gamma_1 within 1% of pi R^2") {
    const double r = 0.05;
    CoverageField f(Domain(2, 1.0), r, r / 50);
    f.add_point(Point({0.0123, -0.0456}));
    const double area = std::numbers::pi * r * r;
    CHECK(std::abs(f.gamma(1) - area) <= 0.01 * area);
  }

  TEST_CASE("two disks: Gamma_2 within 1% of the lens area") {
    const double r = 0.05;
    for (double s : {0.01, 0.03, 0.05, 0.08}) {
      CAPTURE(s);
      CoverageField f(Domain(2, 1.0), r, r / 50);
      f.add_point(Point({0.0, 0.001}));
      f.add_point(Point({s, 0.001}));
      const double lens = oracle::lens_area(r, s);
      CHECK(std::abs(f.gamma(2) - lens) <= 0.01 * lens);
      CHECK(std::abs(f.gamma(1) - (2 * std::numbers::pi * r * r - 2 * lens)) <=
            0.01 * (2 * std::numbers::pi * r * r));
    }
  }

  TEST_CASE("halving h changes Gamma_1 by less than the perimeter bound") {
    const double r = 0.05;
    const Point x({0.0137, 0.0071});
    double prev_err = 1e9;
    double prev = -1.0;
    for (double h : {r / 10, r / 20, r / 40}) {
      CoverageField f(Domain(2, 1.0), r, h);
      f.add_point(x);
      const double g1 = f.gamma(1);
      if (prev >= 0.0) CHECK(std::abs(g1 - prev) < 2 * (2 * h) * (2 * std::numbers::pi * r));
      const double err = std::abs(g1 - std::numbers::pi * r * r);
      CHECK(err <= prev_err + 2 * h * 2 * std::numbers::pi * r * 0.1);
      prev_err = err;
      prev = g1;
    }
  }

  TEST_CASE("k separated disks: Gamma_1 = k pi R^2") {
    const double r = 0.04;
    CoverageField f(Domain(2, 1.0), r, r / 50);
    const std::vector<Point> centres{Point({-0.3, -0.3}), Point({0.3, -0.3}), Point({0.0, 0.0}),
                                     Point({-0.3, 0.3}), Point({0.3, 0.3})};
    for (const auto& c : centres) f.add_point(c);
    const double area = 5 * std::numbers::pi * r * r;
    CHECK(std::abs(f.gamma(1) - area) <= 0.01 * area);
    CHECK(f.gamma(2) == 0.0);
  }

  TEST_CASE("partition, incremental tallies and spot samples after random insertions") {
    for (int d = 1; d <= 3; ++d) {
      CAPTURE(d);
      const Domain dom(d, 1.0);
      const double r = d == 3 ? 0.15 : 0.1;
      const double h = d == 3 ? r / 8 : r / 20;
      CoverageField f(dom, r, h);
      Rng rng(40 + std::uint64_t(d));
      std::vector<Point> pts;
      for (int i = 0; i < 100; ++i) {
        std::vector<double> c(static_cast<std::size_t>(d));
        for (auto& v : c) v = rng.uniform(-0.5, 0.5);
        pts.emplace_back(c);
        f.add_point(pts.back());
        REQUIRE(tally_area(f) == doctest::Approx(1.0).epsilon(1e-12));
      }
      // Recount the whole grid from scratch.
      std::vector<std::uint64_t> fresh(f.tally().size(), 0);
      for (std::size_t cell = 0; cell < f.cell_count(); ++cell) {
        const std::size_t n = oracle::brute_count(f.cell_center(cell), pts, pts.size(), r);
        REQUIRE(n < fresh.size());
        ++fresh[n];
        REQUIRE(f.count_at(cell) == n);
      }
      CHECK(std::equal(fresh.begin(), fresh.end(), f.tally().begin()));
      // Random spot samples against the continuous count.
      for (int s = 0; s < 100; ++s) {
        const auto cell = std::size_t(rng.below(f.cell_count()));
        CHECK(f.count_at(cell) == f.neighbor_count(f.cell_center(cell)));
      }
    }
  }

  TEST_CASE("Gamma_j vanishes while fewer than j points are present") {
    CoverageField f(Domain(2, 1.0), 0.2, 0.01);
    Rng rng(3);
    for (int k = 0; k < 6; ++k) {
      const GammaVector g = f.gamma_stats(8);
      for (int j = k + 1; j <= 8; ++j) CHECK(g[std::size_t(j)] == 0.0);
      f.add_point(Point({rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)}));
    }
  }

  TEST_CASE("counts above the order go to the overflow bucket") {
    CoverageField f(Domain(2, 1.0), 0.2, 0.01);
    for (int k = 0; k < 3; ++k) f.add_point(Point({0.0, 0.0}));
    const GammaVector g = f.gamma_stats(1);
    double sum = g.overflow;
    for (double v : g.values) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.overflow == doctest::Approx(f.gamma(3)));
  }

  TEST_CASE("admissible area") {
    CoverageField f(Domain(2, 1.0), 0.1, 0.005);
    CsaParams rsa{0.1, {}, 1.0, 2};
    CsaParams csa2{0.1, {2.0, 3.0}, 1.0, 2};
    CHECK(f.admissible_area(rsa) == doctest::Approx(1.0));
    Rng rng(1);
    for (int i = 0; i < 30; ++i) f.add_point(Point({rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)}));
    CHECK(f.admissible_area(rsa) == doctest::Approx(f.gamma(0)));
    CHECK(f.admissible_area(csa2) == doctest::Approx(f.gamma(0) + f.gamma(1) + f.gamma(2)));
    CHECK(f.weighted_area(csa2) == doctest::Approx(f.gamma(0) + 2 * f.gamma(1) + 3 * f.gamma(2)));
  }
}
