#include "csa/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csa/error.hpp"

namespace csa {

namespace {

constexpr double kStepTol = 1e-6;  // Newton step in log-parameters at an interior root
constexpr double kMaxStep = 5.0;
constexpr int kMaxHalvings = 60;

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Newton direction for the concave log-likelihood in theta. Falls back to a
// ridge when the Hessian is numerically singular.
Eigen::VectorXd newton_direction(const Eigen::MatrixXd& log_hessian, const Eigen::VectorXd& grad) {
  if (grad.size() == 0) return grad;
  Eigen::MatrixXd a = -log_hessian;
  const double scale = std::max(a.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  double ridge = 0.0;
  for (int attempt = 0; attempt < 20; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(a + ridge * Eigen::MatrixXd::Identity(a.rows(), a.cols()));
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd step = llt.solve(grad);
      if (step.allFinite()) return step;
    }
    ridge = ridge == 0.0 ? 1e-12 * scale : ridge * 100.0;
  }
  return grad;  // steepest ascent
}

bool positive_definite(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return true;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

MleResult make_result(const Eigen::VectorXd& theta, const LikelihoodState& state, int iterations) {
  MleResult r;
  r.beta_hat = BetaVector::from_log(theta);
  r.information = state.information;
  r.iterations = iterations;
  r.gradient_norm = state.score.size() ? state.score.cwiseAbs().maxCoeff() : 0.0;
  r.log_likelihood = state.loglik.value;
  return r;
}

}  // namespace

MleResult fit_mle(const Trajectory& traj, const FitOptions& options) {
  const auto n = Eigen::Index(traj.order);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  if (options.init) {
    if (options.init->size() != std::size_t(n))
      throw ContractViolation("initial beta has the wrong length");
    for (Eigen::Index i = 0; i < n; ++i) {
      const double b = (*options.init)[std::size_t(i)];
      if (!(b > 0.0)) throw ContractViolation("initial beta must be positive");
      theta[i] = std::log(b);
    }
  }

  LikelihoodState state = evaluate(traj, BetaVector::from_log(theta));
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const Eigen::VectorXd beta = theta.array().exp();
    const Eigen::VectorXd grad = beta.cwiseProduct(state.score);
    Eigen::VectorXd step = newton_direction(state.log_hessian, grad);
    const double gnorm = n ? state.score.cwiseAbs().maxCoeff() : 0.0;
    const double snorm = n ? step.cwiseAbs().maxCoeff() : 0.0;

    if (gnorm <= options.tol && snorm <= kStepTol) {
      // One more full Newton step lands on the root to rounding accuracy.
      Eigen::VectorXd polished = theta + step;
      LikelihoodState next = evaluate(traj, BetaVector::from_log(polished));
      const double next_norm = n ? next.score.cwiseAbs().maxCoeff() : 0.0;
      if (next_norm <= std::max(gnorm, options.tol)) {
        theta = polished;
        state = std::move(next);
      }
      MleResult r = make_result(theta, state, iter);
      r.converged = positive_definite(state.information);
      return r;
    }

    if (snorm > kMaxStep) step *= kMaxStep / snorm;
    const double base = state.loglik.value;
    const double slack = 1e-12 * (1.0 + std::abs(base));
    double alpha = 1.0;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h, alpha *= 0.5) {
      Eigen::VectorXd trial = theta + alpha * step;
      LikelihoodState next = evaluate(traj, BetaVector::from_log(trial));
      if (next.loglik.feasible && next.loglik.value >= base - slack) {
        theta = std::move(trial);
        state = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw NonConvergence("line search failed to improve the log-likelihood", to_vector(beta));

    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(theta[j]) > options.drift_limit) {
        MleResult r = make_result(theta, state, iter);
        r.existence = theta[j] > 0 ? Existence::Divergent : Existence::BoundaryZero;
        r.existence_component = int(j) + 1;
        return r;
      }
    }
  }
  throw NonConvergence("no convergence after " + std::to_string(options.max_iter) + " iterations",
                       to_vector(theta.array().exp()));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw ContractViolation("normal quantile needs p in [0, 1]");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r + 0.14810397642748007459) * r +
              0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r + 0.026532189526576123093) * r +
              0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

ConfidenceIntervals confidence_intervals(const MleResult& result, double level) {
  if (!result.converged) throw ContractViolation("confidence intervals need a converged fit");
  if (!(level > 0.0 && level < 1.0)) throw ContractViolation("level must lie in (0, 1)");
  const auto n = result.information.rows();
  ConfidenceIntervals ci;
  ci.level = level;
  if (n == 0) return ci;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(result.information);
  if (!lu.isInvertible()) throw SingularInformation("observed information is singular");
  const Eigen::MatrixXd cov = lu.inverse();
  const double z = normal_quantile(0.5 * (1.0 + level));
  for (Eigen::Index j = 0; j < n; ++j) {
    const double var = cov(j, j);
    if (!(var >= 0.0)) throw SingularInformation("negative variance from the observed information");
    const double se = std::sqrt(var);
    const double b = result.beta_hat[std::size_t(j)];
    ci.estimate.push_back(b);
    ci.std_error.push_back(se);
    ci.bounds.emplace_back(b - z * se, b + z * se);
  }
  return ci;
}

std::string describe(Existence e, int component) {
  switch (e) {
    case Existence::Interior:
      return "interior";
    case Existence::BoundaryZero:
      return "boundary-zero(" + std::to_string(component) + ")";
    case Existence::Divergent:
      return "divergent(" + std::to_string(component) + ")";
  }
  return "unknown";
}

}  // namespace csa
