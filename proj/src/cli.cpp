#include "csa/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csa/asymptotics.hpp"
#include "csa/error.hpp"
#include "csa/estimator.hpp"
#include "csa/io.hpp"
#include "csa/rng.hpp"
#include "csa/simulator.hpp"
#include "csa/statistics.hpp"

namespace csa::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "1.0.0";

// A usage problem detected after flag parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No interior maximum of the likelihood; reported with exit code 3.
struct NoEstimate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_beta(const std::string& text) {
  std::vector<double> beta;
  if (text.empty() || text == "none") return beta;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      beta.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("--beta: cannot parse '" + item + "'");
    }
  }
  return beta;
}

std::string subscript(int j) {
  static const char* digits[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
  std::string s;
  for (char c : std::to_string(j)) s += digits[c - '0'];
  return s;
}

fs::path prepare_out_dir(const std::string& flag) {
  fs::path dir = flag;
  if (dir.empty()) {
    const char* env = std::getenv("CSA_OUT_DIR");
    dir = env && *env ? env : ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& command, const json& config) {
  json m{{"schema", "manifest"},
         {"schema_version", kReportSchemaVersion},
         {"tool", "csa"},
         {"tool_version", kToolVersion},
         {"generator", std::string(kGeneratorVersion)},
         {"command", command},
         {"config", config}};
  write_json(dir / "manifest.json", m);
}

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void write_svg(const fs::path& path, const PointSequence& seq) {
  const double side = seq.params.domain().side();
  const double half = 0.5 * side;
  constexpr double kPixels = 800.0;
  const double scale = kPixels / side;
  const double dot = 0.5 * seq.params.radius * scale;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const std::string height = seq.params.dim == 1 ? fmt(4.0 * dot + 2.0) : fmt(kPixels);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(kPixels)
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << fmt(kPixels) << ' ' << height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << fmt(kPixels) << "\" height=\"" << height
      << "\" fill=\"white\" stroke=\"black\"/>\n<g fill=\"black\">\n";
  for (const Point& p : seq.points) {
    const double x = (p[0] + half) * scale;
    const double y = seq.params.dim == 1 ? 2.0 * dot + 1.0 : (half - p[1]) * scale;
    out << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"" << fmt(dot) << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

struct ModelFlags {
  double radius = 0.0;
  std::string beta = "none";
  double volume = 1.0;
  int dim = 2;

  void attach(CLI::App* app) {
    app->add_option("--R", radius, "interaction radius")->required();
    app->add_option("--beta", beta, "beta_1..beta_N, comma separated; 'none' for hard core");
    app->add_option("--d", dim, "dimension (1, 2 or 3)");
  }

  CsaParams params() const {
    CsaParams p;
    p.radius = radius;
    p.beta = parse_beta(beta);
    p.volume = volume;
    p.dim = dim;
    try {
      p.validate();
    } catch (const ContractViolation& e) {
      throw UsageError(e.what());
    }
    return p;
  }
};

json params_json(const CsaParams& p) { return json(p); }

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

PointSequence load(const std::string& path) { return read_sequence(fs::path(path)); }

std::optional<int> order_for(const PointSequence& seq, std::optional<int> flag) {
  if (flag) {
    if (*flag < 0) throw UsageError("--N must be non-negative");
    return flag;
  }
  if (seq.beta_known) return seq.params.order();
  return std::nullopt;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cooperative sequential adsorption: simulation and likelihood inference", "csa"};
  app.require_subcommand(1);
  // --h is the grid resolution, so help is long-form only.
  app.set_help_flag("--help", "print this help");
  std::string out_flag;
  app.add_option("--out", out_flag, "output directory (default: $CSA_OUT_DIR or .)");

  // simulate
  ModelFlags sim_model;
  std::optional<std::size_t> sim_length;
  bool sim_jam = false;
  std::uint64_t sim_seed = 1;
  double sim_h = 0.0;
  bool sim_svg = false;
  auto* sim = app.add_subcommand("simulate", "simulate a point sequence");
  sim_model.attach(sim);
  sim->add_option("--m", sim_model.volume, "domain volume");
  auto* l_opt = sim->add_option("--l", sim_length, "number of points");
  auto* jam_opt = sim->add_flag("--until-jamming", sim_jam, "run until the domain jams");
  l_opt->excludes(jam_opt);
  sim->add_option("--seed", sim_seed, "random seed");
  sim->add_option("--h", sim_h, "grid resolution (default R/50)");
  sim->add_flag("--svg", sim_svg, "also write pattern.svg");
  sim->add_option("--out", out_flag, "output directory");

  // replay
  std::string replay_in;
  std::optional<int> replay_order;
  double replay_h = 0.0;
  auto* rep = app.add_subcommand("replay", "compute t and Gamma statistics of a sequence");
  rep->add_option("--in", replay_in, "sequence file")->required();
  rep->add_option("--N", replay_order, "model order (default: header, else observed maximum)");
  rep->add_option("--h", replay_h, "grid resolution (default R/50)");
  rep->add_option("--out", out_flag, "output directory");

  // estimate
  std::string est_in;
  std::optional<int> est_order;
  double est_h = 0.0;
  double est_level = 0.95;
  auto* est = app.add_subcommand("estimate", "maximum likelihood fit and confidence intervals");
  est->add_option("--in", est_in, "sequence file")->required();
  est->add_option("--N", est_order, "model order (default: header, else observed maximum)");
  est->add_option("--h", est_h, "grid resolution (default R/50)");
  est->add_option("--level", est_level, "confidence level");
  est->add_option("--out", out_flag, "output directory");

  // experiment
  std::string exp_kind;
  ModelFlags exp_model;
  std::vector<double> exp_m{4.0};
  std::optional<double> exp_mu;
  double exp_mu_fraction = 0.5;
  std::size_t exp_reps = 100;
  std::uint64_t exp_seed = 1;
  int exp_jobs = 0;
  double exp_h = 0.0;
  int exp_nodes = 64;
  int exp_pilots = 1;
  int exp_max_order = 5;
  auto* exp = app.add_subcommand("experiment", "large-domain experiments: clt, mle, curves, minors");
  exp->add_option("kind", exp_kind, "clt | mle | curves | minors")
      ->required()
      ->check(CLI::IsMember({"clt", "mle", "curves", "minors"}));
  exp->add_option("--R", exp_model.radius, "interaction radius");
  exp->add_option("--beta", exp_model.beta, "true beta_1..beta_N");
  exp->add_option("--d", exp_model.dim, "dimension");
  exp->add_option("--m", exp_m, "domain volumes (comma separated)")->delimiter(',');
  exp->add_option("--mu", exp_mu, "point density (default: --mu-fraction of the pilot jamming density)");
  exp->add_option("--mu-fraction", exp_mu_fraction, "fraction of the pilot jamming density");
  exp->add_option("--reps", exp_reps, "replications (cases for minors)");
  exp->add_option("--seed", exp_seed, "random seed");
  exp->add_option("--jobs", exp_jobs, "worker threads (0 = all, 1 = serial)");
  exp->add_option("--h", exp_h, "grid resolution (default R/50)");
  exp->add_option("--nodes", exp_nodes, "curve nodes");
  exp->add_option("--pilots", exp_pilots, "pilot runs for the jamming density");
  exp->add_option("--N", exp_max_order, "largest order for minors");
  exp->add_option("--out", out_flag, "output directory");

  // render
  std::string render_in;
  auto* ren = app.add_subcommand("render", "draw a sequence file as SVG");
  ren->add_option("--in", render_in, "sequence file")->required();
  ren->add_option("--out", out_flag, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "csa: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (sim->parsed()) {
      const CsaParams params = sim_model.params();
      if (!sim_length && !sim_jam) throw UsageError("simulate needs --l or --until-jamming");
      const fs::path dir = prepare_out_dir(out_flag);
      write_manifest(dir, "simulate",
                     {{"params", params_json(params)},
                      {"stop", sim_jam ? json("until-jamming") : json(*sim_length)},
                      {"seed", sim_seed},
                      {"h", sim_h},
                      {"svg", sim_svg}});
      SimulationOptions opts;
      opts.resolution = sim_h;
      const StopRule stop = sim_jam ? StopRule::until_jamming() : StopRule::at_count(*sim_length);
      PointSequence seq = simulate(params, stop, sim_seed, opts);
      write_sequence(dir / "sequence.csv", seq);
      if (sim_svg) write_svg(dir / "pattern.svg", seq);
      out << "simulated " << seq.size() << " points" << (seq.jammed ? " (jammed)" : "")
          << (seq.shortfall ? " short of the requested count" : "") << '\n';
      return kOk;
    }

    if (rep->parsed()) {
      const fs::path dir = prepare_out_dir(out_flag);
      write_manifest(dir, "replay", {{"in", replay_in}, {"N", replay_order ? json(*replay_order) : json(nullptr)}, {"h", replay_h}});
      const PointSequence seq = load(replay_in);
      const Trajectory traj = replay(seq, order_for(seq, replay_order), replay_h);
      json summary{{"schema", "replay"},
                   {"schema_version", kReportSchemaVersion},
                   {"length", traj.length},
                   {"order", traj.order},
                   {"observed_order", seq.points.empty() ? 0 : estimate_order(seq.points, seq.params.radius)},
                   {"resolution", traj.resolution},
                   {"t", traj.t},
                   {"gamma_final", traj.gamma_final},
                   {"weakly_identified", weakly_identified(traj)}};
      write_json(dir / "replay.json", summary);
      out << "t = (" << join(traj.t) << ")\n";
      return kOk;
    }

    if (est->parsed()) {
      if (!(est_level > 0.0 && est_level < 1.0)) throw UsageError("--level must lie in (0, 1)");
      const fs::path dir = prepare_out_dir(out_flag);
      write_manifest(dir, "estimate", {{"in", est_in}, {"N", est_order ? json(*est_order) : json(nullptr)}, {"h", est_h}, {"level", est_level}});
      const PointSequence seq = load(est_in);
      const Trajectory traj = replay(seq, order_for(seq, est_order), est_h);
      const MleResult fit = fit_mle(traj);
      json doc{{"schema", "estimate"}, {"schema_version", kReportSchemaVersion}, {"t", traj.t}, {"mle", fit}};
      if (fit.existence != Existence::Interior) {
        write_json(dir / "estimate.json", doc);
        const std::string beta = "β" + subscript(fit.existence_component);
        throw NoEstimate(fit.existence == Existence::BoundaryZero
                             ? "no positive MLE for " + beta
                             : "no finite MLE for " + beta);
      }
      if (!fit.converged) {
        write_json(dir / "estimate.json", doc);
        throw SingularInformation("observed information is not positive definite at the estimate");
      }
      const ConfidenceIntervals ci = confidence_intervals(fit, est_level);
      doc["intervals"] = ci;
      doc["weakly_identified"] = weakly_identified(traj);
      write_json(dir / "estimate.json", doc);
      for (std::size_t j = 0; j < ci.estimate.size(); ++j)
        out << "beta_" << j + 1 << " = " << fmt(ci.estimate[j], "%.6g") << "  CI ("
            << fmt(ci.bounds[j].first, "%.6g") << ", " << fmt(ci.bounds[j].second, "%.6g") << ")\n";
      return kOk;
    }

    if (exp->parsed()) {
      const fs::path dir = prepare_out_dir(out_flag);
      if (exp_kind == "minors") {
        write_manifest(dir, "experiment minors", {{"cases", exp_reps}, {"N", exp_max_order}, {"seed", exp_seed}});
        if (exp_max_order < 1) throw UsageError("--N must be at least 1");
        const MinorSweep s = minor_identity_sweep(exp_reps, exp_max_order, exp_seed);
        write_json(dir / "minors.json", {{"schema", "minors"},
                                         {"schema_version", kReportSchemaVersion},
                                         {"cases", s.cases},
                                         {"minors", s.minors},
                                         {"seed", exp_seed},
                                         {"max_relative_error", s.max_relative_error},
                                         {"cholesky_failures", s.cholesky_failures}});
        out << "max relative error " << fmt(s.max_relative_error, "%.3e") << ", cholesky failures "
            << s.cholesky_failures << '\n';
        return kOk;
      }

      if (!(exp_model.radius > 0.0)) throw UsageError("--R is required for " + exp_kind);
      if (exp_m.empty()) throw UsageError("--m needs at least one volume");
      json runs = json::array();
      for (double m : exp_m) runs.push_back(m);
      write_manifest(dir, "experiment " + exp_kind,
                     {{"R", exp_model.radius},
                      {"beta", parse_beta(exp_model.beta)},
                      {"d", exp_model.dim},
                      {"m", runs},
                      {"mu", exp_mu ? json(*exp_mu) : json(nullptr)},
                      {"mu_fraction", exp_mu_fraction},
                      {"reps", exp_reps},
                      {"seed", exp_seed},
                      {"h", exp_h},
                      {"nodes", exp_nodes},
                      {"pilots", exp_pilots}});
      // Each volume gets its own report; the density is fixed by the first one.
      std::optional<double> mu = exp_mu;
      std::optional<double> jam;
      for (double m : exp_m) {
        exp_model.volume = m;
        ExperimentConfig cfg;
        cfg.params = exp_model.params();
        cfg.replications = exp_reps;
        cfg.seed = exp_seed;
        cfg.nodes = exp_nodes;
        cfg.jobs = exp_jobs;
        cfg.resolution = exp_h;
        cfg.pilot_runs = exp_pilots;
        if (!jam) jam = pilot_jamming_density(cfg.params, exp_pilots, exp_seed, exp_h, exp_jobs);
        cfg.jam_density = jam;
        if (!mu) mu = exp_mu_fraction * *jam;
        cfg.density = *mu;
        const std::string stem = exp_kind + "_m" + fmt(m, "%g");
        if (exp_kind == "clt") {
          const CltReport r = score_clt_experiment(cfg);
          write_report(dir / (stem + ".json"), r);
          out << "m = " << fmt(m, "%g") << ": score mean (" << fmt(r.mean[0]) << (r.mean.size() > 1 ? ", ..." : "") << ")\n";
        } else if (exp_kind == "mle") {
          const CltReport r = mle_normality_experiment(cfg);
          write_report(dir / (stem + ".json"), r);
          out << "m = " << fmt(m, "%g") << ": coverage";
          for (double c : r.coverage) out << ' ' << fmt(c, "%.3f");
          out << ", failures " << r.failures << '\n';
        } else {
          const LimitCurves c = limit_curves(cfg);
          write_report(dir / (stem + ".json"), c);
          const IntegralResiduals res = check_integral_relation(c, BetaVector(cfg.params.beta));
          write_json(dir / (stem + "_integral.json"), {{"schema", "integral_relation"},
                                                       {"schema_version", kReportSchemaVersion},
                                                       {"rho", res.rho},
                                                       {"integral", res.integral},
                                                       {"residual", res.residual}});
          out << "m = " << fmt(m, "%g") << ": " << c.node_count() << " curve nodes\n";
        }
      }
      return kOk;
    }

    if (ren->parsed()) {
      const fs::path dir = prepare_out_dir(out_flag);
      write_manifest(dir, "render", {{"in", render_in}});
      const PointSequence seq = load(render_in);
      write_svg(dir / "pattern.svg", seq);
      out << "rendered " << seq.size() << " points\n";
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "csa: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "csa: " << e.what() << '\n';
    return kUsage;
  } catch (const InfeasibleDensity& e) {
    err << "csa: " << e.what() << '\n';
    return kUsage;
  } catch (const ContractViolation& e) {
    err << "csa: " << e.what() << '\n';
    return kUsage;
  } catch (const NoEstimate& e) {
    err << "csa: " << e.what() << '\n';
    return kNumerical;
  } catch (const NonConvergence& e) {
    err << "csa: " << e.what() << '\n';
    return kNumerical;
  } catch (const SingularInformation& e) {
    err << "csa: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    // ParseError, IoError, OrderExceeded, DegenerateDensity
    err << "csa: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace csa::cli
