#include <doctest.h>

#include <cmath>
#include <vector>

#include "csa/coverage.hpp"
#include "csa/error.hpp"
#include "csa/estimator.hpp"
#include "csa/simulator.hpp"
#include "oracles.hpp"

using namespace csa;

namespace {

Trajectory prefix(const Trajectory& full, std::size_t length) {
  Trajectory t = full;
  t.length = length;
  t.xi_path.resize(length);
  t.gamma_path.resize(length * full.width());
  t.gamma_final.assign(full.gamma_path.begin() + std::ptrdiff_t(length * full.width()),
                       full.gamma_path.begin() + std::ptrdiff_t((length + 1) * full.width()));
  t.t.assign(full.width(), 0);
  for (int x : t.xi_path) ++t.t[std::size_t(x)];
  return t;
}

Trajectory hard_core_with_order(std::size_t length, int order, std::uint64_t seed) {
  const CsaParams rsa{0.1, {}, 1.0, 2};
  const PointSequence s = simulate(rsa, StopRule::at_count(length), seed, {0.01});
  CoverageField f(rsa.domain(), rsa.radius, 0.01);
  TrajectoryRecorder rec(f, order);
  for (const auto& x : s.points) {
    rec.before_insert(f, 0);
    f.add_point(x);
  }
  return std::move(rec).finish(f);
}

}  // namespace

TEST_SUITE("estimator") {
  TEST_CASE("normal quantile") {
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-15));
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(std::abs(normal_quantile(0.975) - kZ975) < 1e-6);
    CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-13));
    for (double p = 1e-6; p < 1.0; p += 0.0137) CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) <= 1e-12);
    CHECK(std::isinf(normal_quantile(0.0)));
    CHECK_THROWS_AS(normal_quantile(1.5), ContractViolation);
  }

  TEST_CASE("N = 1: Newton root equals the bisection root") {
    int cases = 0;
    for (std::uint64_t seed = 1; cases < 50 && seed < 500; ++seed) {
      const Simulation sim = oracle::small_run(seed, 1, 150);
      const Trajectory& t = sim.trajectory;
      const MleResult fit = fit_mle(t);
      if (fit.existence != Existence::Interior) continue;
      REQUIRE(fit.converged);
      auto s = [&](double b) { return score(t, BetaVector({b}))[0]; };
      double lo = 1e-6, hi = 1e8;
      REQUIRE(s(lo) > 0.0);
      REQUIRE(s(hi) < 0.0);
      const double root = oracle::bisect(s, lo, hi, 1e-12);
      CHECK(std::abs(fit.beta_hat[0] - root) <= 1e-8);
      ++cases;
    }
    CHECK(cases == 50);
  }

  TEST_CASE("N = 2: Newton agrees with a refined grid search") {
    int cases = 0;
    for (std::uint64_t seed = 1; cases < 20 && seed < 200; ++seed) {
      const Simulation sim = oracle::small_run(500 + seed, 2, 200);
      const Trajectory& t = sim.trajectory;
      const MleResult fit = fit_mle(t);
      if (fit.existence != Existence::Interior) continue;
      REQUIRE(fit.converged);
      constexpr int kGrid = 200;
      double lo0 = std::log(1e-2), hi0 = std::log(1e4), lo1 = lo0, hi1 = hi0;
      double step0 = 0, step1 = 0, best0 = 0, best1 = 0;
      for (int pass = 0; pass < 2; ++pass) {
        step0 = (hi0 - lo0) / (kGrid - 1);
        step1 = (hi1 - lo1) / (kGrid - 1);
        double best = -INFINITY;
        for (int i = 0; i < kGrid; ++i)
          for (int j = 0; j < kGrid; ++j) {
            const double a = lo0 + i * step0, b = lo1 + j * step1;
            const double v = log_likelihood(t, BetaVector({std::exp(a), std::exp(b)})).value;
            if (v > best) {
              best = v;
              best0 = a;
              best1 = b;
            }
          }
        lo0 = best0 - 2 * step0;
        hi0 = best0 + 2 * step0;
        lo1 = best1 - 2 * step1;
        hi1 = best1 + 2 * step1;
      }
      CHECK(std::abs(best0 - std::log(fit.beta_hat[0])) <= 2 * step0);
      CHECK(std::abs(best1 - std::log(fit.beta_hat[1])) <= 2 * step1);
      ++cases;
    }
    CHECK(cases == 20);
  }

  TEST_CASE("converged fits satisfy the first-order condition and are local maxima") {
    Rng rng(4);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Simulation sim = oracle::small_run(900 + seed, 2, 200);
      const MleResult fit = fit_mle(sim.trajectory);
      if (fit.existence != Existence::Interior) continue;
      REQUIRE(fit.converged);
      CHECK(score(sim.trajectory, fit.beta_hat).cwiseAbs().maxCoeff() <= 1e-8);
      Eigen::LLT<Eigen::MatrixXd> llt(fit.information);
      CHECK(llt.info() == Eigen::Success);
      const double best = log_likelihood(sim.trajectory, fit.beta_hat).value;
      for (int k = 0; k < 100; ++k) {
        std::vector<double> b{fit.beta_hat[0] * std::exp(rng.uniform(-0.2, 0.2)),
                              fit.beta_hat[1] * std::exp(rng.uniform(-0.2, 0.2))};
        CHECK(log_likelihood(sim.trajectory, BetaVector(b)).value <= best);
      }
    }
  }

  TEST_CASE("the fit does not depend on the starting point") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Simulation sim = oracle::small_run(300 + seed, 2, 200);
      std::vector<MleResult> fits;
      for (double s : {0.1, 1.0, 10.0, 100.0}) {
        FitOptions o;
        o.init = std::vector<double>{s, s};
        const MleResult r = fit_mle(sim.trajectory, o);
        if (r.converged) fits.push_back(r);
      }
      for (const auto& r : fits)
        for (std::size_t j = 0; j < 2; ++j)
          CHECK(std::abs(r.beta_hat[j] - fits[0].beta_hat[j]) <= 1e-6 * fits[0].beta_hat[j]);
    }
  }

  TEST_CASE("t_1 = 0 gives BoundaryZero(1)") {
    const Trajectory t = hard_core_with_order(40, 1, 3);
    const MleResult r = fit_mle(t);
    CHECK_FALSE(r.converged);
    CHECK(r.existence == Existence::BoundaryZero);
    CHECK(r.existence_component == 1);
    CHECK(describe(r.existence, r.existence_component) == "boundary-zero(1)");
  }

  TEST_CASE("two points, the second a neighbour: Divergent(1)") {
    const CsaParams p{0.1, {1.0}, 1.0, 2};
    CoverageField f(p.domain(), p.radius, 0.002);
    TrajectoryRecorder rec(f, 1);
    rec.before_insert(f, 0);
    f.add_point(Point({0.0, 0.0}));
    rec.before_insert(f, 1);
    f.add_point(Point({0.05, 0.0}));
    const MleResult r = fit_mle(std::move(rec).finish(f));
    CHECK_FALSE(r.converged);
    CHECK(r.existence == Existence::Divergent);
    CHECK(r.existence_component == 1);
  }

  TEST_CASE("order 0 has nothing to estimate") {
    const Trajectory t = hard_core_with_order(20, 0, 1);
    const MleResult r = fit_mle(t);
    CHECK(r.converged);
    CHECK(r.beta_hat.size() == 0);
  }

  TEST_CASE("exhausted iterations raise NonConvergence with the last iterate") {
    const Simulation sim = oracle::small_run(17, 2, 200);
    FitOptions o;
    o.max_iter = 1;
    o.init = std::vector<double>{1e-3, 1e3};
    try {
      fit_mle(sim.trajectory, o);
      FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
      CHECK(e.last_iterate().size() == 2);
    }
  }

  TEST_CASE("confidence intervals") {
    const Simulation sim = oracle::small_run(23, 2, 200);
    const MleResult fit = fit_mle(sim.trajectory);
    REQUIRE(fit.converged);
    const ConfidenceIntervals ci = confidence_intervals(fit, 0.95);
    const Eigen::MatrixXd cov = fit.information.inverse();
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(ci.std_error[j] == doctest::Approx(std::sqrt(cov(Eigen::Index(j), Eigen::Index(j)))));
      CHECK(ci.bounds[j].first < ci.estimate[j]);
      CHECK(ci.estimate[j] < ci.bounds[j].second);
      CHECK(ci.bounds[j].second - ci.estimate[j] ==
            doctest::Approx(normal_quantile(0.975) * ci.std_error[j]));
      CHECK(ci.contains(j, ci.estimate[j]));
    }
    const ConfidenceIntervals narrow = confidence_intervals(fit, 1e-12);
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(narrow.bounds[j].second - narrow.bounds[j].first <= 1e-9 * narrow.estimate[j]);
    CHECK_THROWS_AS(confidence_intervals(fit, 1.0), ContractViolation);
    MleResult singular = fit;
    singular.information = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(confidence_intervals(singular, 0.95), SingularInformation);
    MleResult unconverged = fit;
    unconverged.converged = false;
    CHECK_THROWS_AS(confidence_intervals(unconverged, 0.95), ContractViolation);
  }

  TEST_CASE("intervals narrow as the sequence grows") {
    const CsaParams p{0.02, {300.0, 500.0}, 1.0, 2};
    int narrower = 0, runs = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const Simulation sim = simulate_with_trajectory(p, StopRule::until_jamming(), seed);
      const MleResult full = fit_mle(sim.trajectory);
      const MleResult part = fit_mle(prefix(sim.trajectory, 500));
      ++runs;
      if (!full.converged || !part.converged) continue;
      const auto a = confidence_intervals(full), b = confidence_intervals(part);
      bool ok = true;
      for (std::size_t j = 0; j < 2; ++j)
        ok = ok && (a.bounds[j].second - a.bounds[j].first <= b.bounds[j].second - b.bounds[j].first);
      narrower += ok;
    }
    CHECK(double(narrower) >= 0.9 * runs);
  }
}
