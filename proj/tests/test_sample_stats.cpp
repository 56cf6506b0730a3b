#include <doctest.h>

#include <cmath>
#include <vector>

#include "csa/error.hpp"
#include "csa/estimator.hpp"
#include "csa/rng.hpp"
#include "csa/sample_stats.hpp"

using namespace csa;

TEST_SUITE("sample_stats") {
  TEST_CASE("moments") {
    const std::vector<double> x{1, 2, 3, 4, 10};
    CHECK(stats::mean(x) == doctest::Approx(4.0));
    CHECK(stats::variance(x) == doctest::Approx(12.5));
    CHECK(stats::skewness(std::vector<double>{1, 2, 3}) == doctest::Approx(0.0));
    CHECK(stats::skewness(x) > 0.0);
    CHECK_THROWS_AS(stats::variance(std::vector<double>{1.0}), ContractViolation);
  }

  TEST_CASE("covariance of observations in rows") {
    Eigen::MatrixXd s(4, 2);
    s << 1, 2, 2, 4, 3, 6, 4, 8;
    const Eigen::MatrixXd c = stats::covariance(s);
    CHECK(c(0, 0) == doctest::Approx(5.0 / 3.0));
    CHECK(c(0, 1) == doctest::Approx(10.0 / 3.0));
    CHECK(c(1, 1) == doctest::Approx(20.0 / 3.0));
  }

  TEST_CASE("chi-square upper tail") {
    CHECK(stats::chi_square_pvalue(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(stats::chi_square_pvalue(0.0, 3) == 1.0);
  }

  TEST_CASE("Kolmogorov distribution") {
    // Asymptotic 5% critical value 1.3581.
    CHECK(stats::kolmogorov_pvalue(1.3581 / std::sqrt(1e8), 100000000) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(stats::kolmogorov_pvalue(0.0, 50) == 1.0);
    CHECK(stats::kolmogorov_pvalue(1.0, 50) < 1e-10);
  }

  TEST_CASE("KS accepts normal samples and rejects uniform ones") {
    Rng rng(7);
    int rejected = 0;
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> x(300);
      for (auto& v : x) v = normal_quantile(std::clamp(rng.uniform(), 1e-15, 1 - 1e-15));
      rejected += stats::ks_pvalue_normal(x) < 0.05;
    }
    // Size of the test: about 5% of 200.
    CHECK(rejected >= 2);
    CHECK(rejected <= 22);
    std::vector<double> u(300);
    for (auto& v : u) v = rng.uniform(-1.7, 1.7);
    CHECK(stats::ks_pvalue_normal(stats::studentize(u)) < 0.05);
  }
}
