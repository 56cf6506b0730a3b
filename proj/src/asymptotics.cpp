#include "csa/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "csa/error.hpp"
#include "csa/estimator.hpp"
#include "csa/kernels.hpp"
#include "csa/replicate.hpp"
#include "csa/rng.hpp"
#include "csa/sample_stats.hpp"
#include "csa/simulator.hpp"

namespace csa {

namespace {

constexpr std::uint64_t kPilotStream = 1'000'000'000ULL;
constexpr int kProjections = 8;

double resolve_jam_density(const ExperimentConfig& config) {
  const double jam = config.jam_density
                         ? *config.jam_density
                         : pilot_jamming_density(config.params, config.pilot_runs, config.seed,
                                                 config.resolution, config.jobs);
  if (!(config.density > 0.0) || config.density > config.max_jam_fraction * jam)
    throw InfeasibleDensity(config.density, jam);
  return jam;
}

std::size_t target_length(const ExperimentConfig& config) {
  return static_cast<std::size_t>(std::floor(config.density * config.params.volume));
}

Simulation simulate_replication(const ExperimentConfig& config, std::size_t length,
                                std::size_t rep) {
  SimulationOptions opts;
  opts.resolution = config.resolution;
  Simulation sim = simulate_with_trajectory(config.params, StopRule::at_count(length),
                                            derive_seed(config.seed, rep), opts);
  if (sim.sequence.shortfall)
    throw InfeasibleDensity(config.density,
                            double(sim.sequence.size()) / config.params.volume);
  return sim;
}

// Q with gamma_j >= 0 allowed (the curve starts at an empty configuration).
Eigen::MatrixXd q_matrix_unchecked(std::span<const double> beta, std::span<const double> gamma) {
  const auto n = Eigen::Index(beta.size());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  double z = gamma[0];
  for (std::size_t i = 0; i < beta.size(); ++i) z += beta[i] * gamma[i + 1];
  if (!(z > 0.0)) return q;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double gi = gamma[std::size_t(i) + 1];
    for (Eigen::Index j = 0; j < n; ++j) {
      const double gj = gamma[std::size_t(j) + 1];
      q(i, j) = (i == j ? gi / (beta[std::size_t(i)] * z) : 0.0) - gi * gj / (z * z);
    }
  }
  return q;
}

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index c) {
  std::vector<double> v(std::size_t(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) v[std::size_t(r)] = m(r, c);
  return v;
}

void fill_distribution_summary(CltReport& report) {
  const Eigen::MatrixXd& x = report.samples;
  const auto n = x.cols();
  report.mean = x.colwise().mean().transpose();
  report.covariance = stats::covariance(x);
  report.skewness.clear();
  report.excess_kurtosis.clear();
  report.ks_pvalues.clear();
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto v = column(x, c);
    report.skewness.push_back(stats::skewness(v));
    report.excess_kurtosis.push_back(stats::excess_kurtosis(v));
    report.ks_pvalues.push_back(stats::ks_pvalue_normal(stats::studentize(v)));
  }
  // Fixed random directions, drawn from a stream independent of the replications.
  Rng rng(report.seed, 0xC7A3D17EULL);
  report.projection_ks_pvalues.clear();
  for (int p = 0; p < kProjections; ++p) {
    Eigen::VectorXd dir(n);
    for (Eigen::Index c = 0; c < n; ++c) dir[c] = normal_quantile(std::clamp(rng.uniform(), 1e-12, 1.0 - 1e-12));
    if (dir.norm() == 0.0) dir.setOnes();
    dir.normalize();
    const Eigen::VectorXd proj = x * dir;
    std::vector<double> v(proj.data(), proj.data() + proj.size());
    report.projection_ks_pvalues.push_back(stats::ks_pvalue_normal(stats::studentize(v)));
  }
}

}  // namespace

double pilot_jamming_density(const CsaParams& params, int runs, std::uint64_t seed,
                             double resolution, int jobs) {
  if (runs < 1) throw ContractViolation("at least one pilot run is needed");
  std::vector<std::size_t> counts(static_cast<std::size_t>(runs));
  SimulationOptions opts;
  opts.resolution = resolution;
  for_each_replication(counts.size(), jobs, [&](std::size_t r) {
    counts[r] =
        simulate(params, StopRule::until_jamming(), derive_seed(seed, kPilotStream + r), opts).size();
  });
  double total = 0.0;
  for (auto c : counts) total += double(c);
  return total / double(runs) / params.volume;
}

std::vector<std::size_t> curve_steps(std::size_t length, int nodes) {
  if (nodes < 2) throw ContractViolation("at least two curve nodes are needed");
  std::vector<std::size_t> steps;
  for (int i = 0; i < nodes; ++i) {
    const auto k = static_cast<std::size_t>(std::llround(double(i) * double(length) / (nodes - 1)));
    if (steps.empty() || k > steps.back()) steps.push_back(k);
  }
  return steps;
}

CurveAccumulator::CurveAccumulator(const CsaParams& params, std::size_t length, int nodes)
    : params_(params), steps_(curve_steps(length, nodes)) {
  const std::size_t width = std::size_t(params.order()) + 1;
  gamma_sum_.assign(steps_.size(), std::vector<double>(width, 0.0));
  rho_sum_.assign(steps_.size(), std::vector<double>(width, 0.0));
}

void CurveAccumulator::add(const Trajectory& traj) {
  if (traj.order != params_.order()) throw ContractViolation("trajectory order mismatch");
  if (traj.length < steps_.back()) throw ContractViolation("trajectory shorter than the curve");
  const double m = traj.volume;
  std::vector<std::size_t> t(traj.width(), 0);
  std::size_t done = 0;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const std::size_t k = steps_[i];
    for (; done < k; ++done) ++t[std::size_t(traj.xi_path[done])];
    const auto row = k < traj.length ? traj.gamma_row(k) : std::span<const double>(traj.gamma_final);
    for (std::size_t j = 0; j < traj.width(); ++j) {
      gamma_sum_[i][j] += row[j] / m;
      rho_sum_[i][j] += double(t[j]) / m;
    }
  }
  ++count_;
}

void CurveAccumulator::merge(const CurveAccumulator& other) {
  for (std::size_t i = 0; i < steps_.size(); ++i)
    for (std::size_t j = 0; j < gamma_sum_[i].size(); ++j) {
      gamma_sum_[i][j] += other.gamma_sum_[i][j];
      rho_sum_[i][j] += other.rho_sum_[i][j];
    }
  count_ += other.count_;
}

LimitCurves CurveAccumulator::finish() const {
  if (count_ == 0) throw ContractViolation("no trajectories accumulated");
  LimitCurves c;
  c.params = params_;
  c.replications = count_;
  c.steps = steps_;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    c.lambda.push_back(double(steps_[i]) / params_.volume);
    std::vector<double> g(gamma_sum_[i]), r(rho_sum_[i]);
    for (auto& v : g) v /= double(count_);
    for (auto& v : r) v /= double(count_);
    c.gamma.push_back(std::move(g));
    c.rho.push_back(std::move(r));
  }
  return c;
}

LimitCurves limit_curves(const ExperimentConfig& config) {
  config.params.validate();
  const double jam = resolve_jam_density(config);
  const std::size_t length = target_length(config);
  std::vector<CurveAccumulator> per_rep(config.replications,
                                        CurveAccumulator(config.params, length, config.nodes));
  for_each_replication(config.replications, config.jobs, [&](std::size_t r) {
    per_rep[r].add(simulate_replication(config, length, r).trajectory);
  });
  CurveAccumulator total(config.params, length, config.nodes);
  for (const auto& a : per_rep) total.merge(a);
  LimitCurves curves = total.finish();
  curves.density = config.density;
  curves.jam_density = jam;
  curves.seed = config.seed;
  return curves;
}

IntegralResiduals check_integral_relation(const LimitCurves& curves, const BetaVector& beta) {
  const int n = curves.order();
  if (beta.size() != std::size_t(n)) throw ContractViolation("beta does not match the curve order");
  IntegralResiduals out;
  if (n == 0 || curves.node_count() == 0) return out;
  auto integrand = [&](std::size_t node, int j) {
    const auto& g = curves.gamma[node];
    double z = g[0];
    for (int i = 1; i <= n; ++i) z += beta[std::size_t(i - 1)] * g[std::size_t(i)];
    return z > 0.0 ? beta[std::size_t(j - 1)] * g[std::size_t(j)] / z : 0.0;
  };
  for (int j = 1; j <= n; ++j) {
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < curves.node_count(); ++i)
      area += 0.5 * (integrand(i, j) + integrand(i + 1, j)) * (curves.lambda[i + 1] - curves.lambda[i]);
    const double rho = curves.rho.back()[std::size_t(j)];
    out.rho.push_back(rho);
    out.integral.push_back(area);
    out.residual.push_back(std::abs(rho - area));
  }
  return out;
}

Eigen::MatrixXd q_matrix(std::span<const double> beta, std::span<const double> gamma) {
  if (gamma.size() != beta.size() + 1) throw ContractViolation("gamma must hold gamma_0..gamma_N");
  for (double b : beta)
    if (!(b > 0.0)) throw ContractViolation("q_matrix needs positive beta");
  for (double g : gamma)
    if (!(g > 0.0)) throw ContractViolation("q_matrix needs positive gamma");
  return q_matrix_unchecked(beta, gamma);
}

MinorCheck minor_determinant_check(std::span<const double> beta, std::span<const double> gamma,
                                   int k) {
  const int n = static_cast<int>(beta.size());
  if (k < 1 || k > n) throw ContractViolation("minor order must lie in 1..N");
  const Eigen::MatrixXd q = q_matrix(beta, gamma);
  double z = gamma[0];
  for (int i = 0; i < n; ++i) z += beta[std::size_t(i)] * gamma[std::size_t(i) + 1];
  double tail = gamma[0];
  for (int i = k; i < n; ++i) tail += beta[std::size_t(i)] * gamma[std::size_t(i) + 1];
  double prod = 1.0;
  for (int i = 0; i < k; ++i) prod *= gamma[std::size_t(i) + 1] / beta[std::size_t(i)];
  MinorCheck out;
  out.closed_form = tail / std::pow(z, k + 1) * prod;
  out.numeric = q.topLeftCorner(k, k).partialPivLu().determinant();
  return out;
}

MinorSweep minor_identity_sweep(std::size_t cases, int max_order, std::uint64_t seed) {
  if (max_order < 1) throw ContractViolation("max_order must be at least 1");
  Rng rng(seed, 0x5EEDULL);
  MinorSweep out;
  out.cases = cases;
  for (std::size_t c = 0; c < cases; ++c) {
    const int n = 1 + int(rng.below(std::uint64_t(max_order)));
    std::vector<double> beta(static_cast<std::size_t>(n)), gamma(static_cast<std::size_t>(n) + 1);
    for (auto& b : beta) b = std::exp(rng.uniform(std::log(1e-2), std::log(1e2)));
    for (auto& g : gamma) g = std::exp(rng.uniform(std::log(1e-3), std::log(1.0)));
    for (int k = 1; k <= n; ++k) {
      const MinorCheck m = minor_determinant_check(beta, gamma, k);
      out.max_relative_error =
          std::max(out.max_relative_error, std::abs(m.numeric - m.closed_form) / std::abs(m.closed_form));
      ++out.minors;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(q_matrix(beta, gamma));
    if (llt.info() != Eigen::Success) ++out.cholesky_failures;
  }
  return out;
}

std::vector<std::complex<double>> rank_one_eigenvalues(std::span<const double> a,
                                                       std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw ContractViolation("vectors must share a length");
  const auto n = Eigen::Index(a.size());
  const Eigen::Map<const Eigen::VectorXd> va(a.data(), n), vb(b.data(), n);
  const Eigen::MatrixXd m = va * vb.transpose();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  std::vector<std::complex<double>> ev(solver.eigenvalues().data(),
                                       solver.eigenvalues().data() + n);
  std::sort(ev.begin(), ev.end(),
            [](const auto& x, const auto& y) { return std::abs(x) > std::abs(y); });
  return ev;
}

Eigen::MatrixXd limit_information(const LimitCurves& curves, const BetaVector& beta, double mu) {
  const auto n = Eigen::Index(beta.size());
  if (beta.size() != std::size_t(curves.order())) throw ContractViolation("beta does not match the curve order");
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i + 1 < curves.node_count(); ++i) {
    if (curves.lambda[i + 1] > mu * (1.0 + 1e-12)) break;
    const double w = 0.5 * (curves.lambda[i + 1] - curves.lambda[i]);
    total += w * (q_matrix_unchecked(beta.values(), curves.gamma[i]) +
                  q_matrix_unchecked(beta.values(), curves.gamma[i + 1]));
  }
  return total;
}

double MartingaleReport::max_reconstruction_error() const {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < score.size(); ++k)
    worst = std::max(worst, std::abs(reconstructed[k] - score[k]) / std::max(1.0, std::abs(score[k])));
  return worst;
}

bool MartingaleReport::within_bound() const {
  for (Eigen::Index k = 0; k < bound.size(); ++k)
    if (max_abs_increment[k] > bound[k]) return false;
  return true;
}

MartingaleReport martingale_mean_check(const Trajectory& traj, const BetaVector& beta) {
  const auto n = Eigen::Index(beta.size());
  if (beta.size() != std::size_t(traj.order)) throw ContractViolation("beta does not match the trajectory order");
  MartingaleReport r;
  r.increments.resize(Eigen::Index(traj.length), n);
  for (std::size_t i = 0; i < traj.length; ++i) {
    const auto row = traj.gamma_row(i);
    double z = row[0];
    for (Eigen::Index k = 0; k < n; ++k) z += beta[std::size_t(k)] * row[std::size_t(k) + 1];
    for (Eigen::Index k = 0; k < n; ++k) {
      const double bk = beta[std::size_t(k)];
      const double xi = traj.xi_path[i] == k + 1 ? 1.0 : 0.0;
      const double xibar = bk * row[std::size_t(k) + 1] / z;
      r.increments(Eigen::Index(i), k) = (xi - xibar) / bk;
    }
  }
  r.reconstructed.resize(n);
  r.max_abs_increment.resize(n);
  r.bound.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    kernels::CompensatedSum s;
    for (Eigen::Index i = 0; i < r.increments.rows(); ++i) s.add(r.increments(i, k));
    r.reconstructed[k] = s.value();
    r.max_abs_increment[k] = r.increments.rows() ? r.increments.col(k).cwiseAbs().maxCoeff() : 0.0;
    r.bound[k] = 2.0 / beta[std::size_t(k)];
  }
  r.score = score(traj, beta);
  r.quadratic_variation = r.increments.transpose() * r.increments;
  return r;
}

CltReport score_clt_experiment(const ExperimentConfig& config) {
  config.params.validate();
  const double jam = resolve_jam_density(config);
  const std::size_t length = target_length(config);
  const BetaVector beta0(config.params.beta);
  const auto n = Eigen::Index(beta0.size());
  const double m = config.params.volume;
  const double root_m = std::sqrt(m);

  std::vector<Eigen::VectorXd> scores(config.replications);
  std::vector<Eigen::MatrixXd> info(config.replications), qv(config.replications);
  for_each_replication(config.replications, config.jobs, [&](std::size_t r) {
    const Simulation sim = simulate_replication(config, length, r);
    const MartingaleReport mr = martingale_mean_check(sim.trajectory, beta0);
    scores[r] = mr.score / root_m;
    info[r] = observed_information(sim.trajectory, beta0) / m;
    qv[r] = mr.quadratic_variation / m;
  });

  CltReport report;
  report.kind = "score";
  report.params = config.params;
  report.density = config.density;
  report.jam_density = jam;
  report.length = length;
  report.replications = config.replications;
  report.seed = config.seed;
  report.samples.resize(Eigen::Index(config.replications), n);
  report.reference_covariance = Eigen::MatrixXd::Zero(n, n);
  report.mean_quadratic_variation = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t r = 0; r < config.replications; ++r) {
    report.samples.row(Eigen::Index(r)) = scores[r].transpose();
    report.reference_covariance += info[r];
    report.mean_quadratic_variation += qv[r];
  }
  report.reference_covariance /= double(config.replications);
  report.mean_quadratic_variation /= double(config.replications);
  fill_distribution_summary(report);
  return report;
}

CltReport mle_normality_experiment(const ExperimentConfig& config) {
  config.params.validate();
  const double jam = resolve_jam_density(config);
  const std::size_t length = target_length(config);
  const BetaVector beta0(config.params.beta);
  const auto n = Eigen::Index(beta0.size());
  const double m = config.params.volume;
  const double root_m = std::sqrt(m);

  struct Outcome {
    bool ok = false;
    Eigen::VectorXd scaled_error;
    std::vector<bool> covered;
  };
  std::vector<Outcome> outcomes(config.replications);
  std::vector<CurveAccumulator> curves(config.replications,
                                       CurveAccumulator(config.params, length, config.nodes));
  for_each_replication(config.replications, config.jobs, [&](std::size_t r) {
    const Simulation sim = simulate_replication(config, length, r);
    curves[r].add(sim.trajectory);
    try {
      const MleResult fit = fit_mle(sim.trajectory);
      if (!fit.converged || fit.existence != Existence::Interior) return;
      const ConfidenceIntervals ci = confidence_intervals(fit, 0.95);
      Outcome& o = outcomes[r];
      o.scaled_error = root_m * (fit.beta_hat.as_eigen() - beta0.as_eigen());
      for (Eigen::Index j = 0; j < n; ++j) o.covered.push_back(ci.contains(std::size_t(j), beta0[std::size_t(j)]));
      o.ok = true;
    } catch (const NonConvergence&) {
    } catch (const SingularInformation&) {
    }
  });

  CltReport report;
  report.kind = "mle";
  report.params = config.params;
  report.density = config.density;
  report.jam_density = jam;
  report.length = length;
  report.replications = config.replications;
  report.seed = config.seed;

  std::vector<const Outcome*> good;
  for (const auto& o : outcomes)
    if (o.ok) good.push_back(&o);
  report.failures = config.replications - good.size();
  report.unstable = double(report.failures) > 0.05 * double(config.replications);
  if (good.size() < 2) throw NonConvergence("fewer than two replications produced an MLE", {});

  report.samples.resize(Eigen::Index(good.size()), n);
  report.coverage.assign(std::size_t(n), 0.0);
  for (std::size_t i = 0; i < good.size(); ++i) {
    report.samples.row(Eigen::Index(i)) = good[i]->scaled_error.transpose();
    for (Eigen::Index j = 0; j < n; ++j)
      if (good[i]->covered[std::size_t(j)]) report.coverage[std::size_t(j)] += 1.0;
  }
  for (auto& c : report.coverage) c /= double(good.size());
  fill_distribution_summary(report);
  report.variance = report.covariance.diagonal() / m;

  CurveAccumulator total(config.params, length, config.nodes);
  for (const auto& c : curves) total.merge(c);
  const LimitCurves lc = total.finish();
  const Eigen::MatrixXd limit_info = limit_information(lc, beta0, config.density);
  report.reference_covariance = limit_info.inverse();

  // Both readings of the per-parameter variance limit: diagonal entries and
  // (descending) eigenvalues of Q integrated over lambda.
  Eigen::VectorXd diag_int = Eigen::VectorXd::Zero(n), eig_int = Eigen::VectorXd::Zero(n);
  auto eig_desc = [&](std::size_t node) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q_matrix_unchecked(beta0.values(), lc.gamma[node]));
    Eigen::VectorXd v = es.eigenvalues();
    std::sort(v.data(), v.data() + v.size(), std::greater<double>());
    return v;
  };
  for (std::size_t i = 0; i + 1 < lc.node_count(); ++i) {
    const double w = 0.5 * (lc.lambda[i + 1] - lc.lambda[i]);
    diag_int += w * (q_matrix_unchecked(beta0.values(), lc.gamma[i]).diagonal() +
                     q_matrix_unchecked(beta0.values(), lc.gamma[i + 1]).diagonal());
    eig_int += w * (eig_desc(i) + eig_desc(i + 1));
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    report.variance_limit_diagonal.push_back(1.0 / diag_int[j]);
    report.variance_limit_eigen.push_back(1.0 / eig_int[j]);
  }
  return report;
}

double max_relative_deviation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ContractViolation("shape mismatch");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / std::abs(b(i, j)));
  return worst;
}

}  // namespace csa
