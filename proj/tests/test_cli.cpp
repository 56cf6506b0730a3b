#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "csa/cli.hpp"
#include "csa/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result csa_run(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"csa"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = csa::cli::run(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("csa_cli_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json json_of(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("simulate, replay and estimate a sparse high-rate pattern") {
    const fs::path d = fresh("sparse");
    auto r = csa_run({"simulate", "--R", "0.01", "--beta", "1000,10000", "--l", "1000", "--seed", "7",
                      "--out", d.string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(d / "manifest.json"));
    CHECK(fs::exists(d / "sequence.csv"));
    r = csa_run({"replay", "--in", (d / "sequence.csv").string(), "--out", d.string()});
    REQUIRE(r.code == 0);
    const auto rep = json_of(d / "replay.json");
    CHECK(rep["length"] == 1000);
    CHECK(rep["observed_order"] == 2);
    r = csa_run({"estimate", "--in", (d / "sequence.csv").string(), "--out", d.string()});
    REQUIRE(r.code == 0);
    const auto est = json_of(d / "estimate.json");
    const auto beta = est["mle"]["beta_hat"].get<std::vector<double>>();
    REQUIRE(beta.size() == 2);
    // Same order of magnitude as the reference estimates (1105, 10510).
    CHECK(beta[0] > 1105.0 / 3);
    CHECK(beta[0] < 1105.0 * 3);
    CHECK(beta[1] > 10510.0 / 3);
    CHECK(beta[1] < 10510.0 * 3);
    CHECK(est["intervals"]["bounds"].size() == 2);
    CHECK(json_of(d / "manifest.json")["command"] == "estimate");
  }

  TEST_CASE("hard core: replay gives t = (l, 0, ...); estimating beta_1 fails with exit 3") {
    const fs::path d = fresh("rsa");
    auto r = csa_run({"simulate", "--R", "0.03", "--until-jamming", "--seed", "2", "--out", d.string()});
    REQUIRE(r.code == 0);
    r = csa_run({"replay", "--in", (d / "sequence.csv").string(), "--N", "2", "--out", d.string()});
    REQUIRE(r.code == 0);
    const auto rep = json_of(d / "replay.json");
    const auto t = rep["t"].get<std::vector<std::size_t>>();
    CHECK(t[0] == rep["length"].get<std::size_t>());
    CHECK(t[1] == 0);
    CHECK(t[2] == 0);
    r = csa_run({"estimate", "--in", (d / "sequence.csv").string(), "--N", "1", "--out", d.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("no positive MLE for β₁") != std::string::npos);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  }

  TEST_CASE("identical invocations produce byte-identical outputs") {
    const fs::path a = fresh("det_a"), b = fresh("det_b");
    for (const auto& d : {a, b}) {
      REQUIRE(csa_run({"simulate", "--R", "0.03", "--beta", "5,20", "--l", "300", "--seed", "11", "--svg",
                       "--out", d.string()})
                  .code == 0);
      REQUIRE(csa_run({"estimate", "--in", (d / "sequence.csv").string(), "--out", d.string()}).code == 0);
    }
    for (const char* f : {"sequence.csv", "pattern.svg", "estimate.json"}) {
      CAPTURE(f);
      CHECK(slurp(a / f) == slurp(b / f));
    }
  }

  TEST_CASE("exit codes") {
    CHECK(csa_run({}).code == 1);
    CHECK(csa_run({"simulate", "--R", "0.1"}).code == 1);
    CHECK(csa_run({"simulate", "--R", "0.1", "--beta", "1,x", "--l", "3"}).code == 1);
    CHECK(csa_run({"simulate", "--R", "0.1", "--beta", "1,-2", "--l", "3"}).code == 1);
    CHECK(csa_run({"simulate", "--R", "0.1", "--l", "3", "--until-jamming"}).code == 1);
    CHECK(csa_run({"simulate", "--R", "0.1", "--l", "3", "--h", "0.5", "--out", fresh("h").string()}).code == 1);
    CHECK(csa_run({"experiment", "bogus"}).code == 1);
    CHECK(csa_run({"--help"}).code == 0);

    const fs::path d = fresh("bad");
    fs::create_directories(d);
    std::ofstream(d / "bad.csv") << "# {}\n";
    const auto r = csa_run({"estimate", "--in", (d / "bad.csv").string(), "--out", d.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 1") != std::string::npos);
    // The manifest is written before any work.
    CHECK(fs::exists(d / "manifest.json"));
    CHECK(csa_run({"replay", "--in", (d / "missing.csv").string(), "--out", d.string()}).code == 2);
  }

  TEST_CASE("the output directory defaults to CSA_OUT_DIR") {
    const fs::path d = fresh("env");
    setenv("CSA_OUT_DIR", d.string().c_str(), 1);
    const auto r = csa_run({"simulate", "--R", "0.05", "--l", "10"});
    unsetenv("CSA_OUT_DIR");
    CHECK(r.code == 0);
    CHECK(fs::exists(d / "sequence.csv"));
  }

  TEST_CASE("render draws dots of radius R/2") {
    const fs::path d = fresh("render");
    REQUIRE(csa_run({"simulate", "--R", "0.05", "--beta", "2", "--l", "20", "--out", d.string()}).code == 0);
    REQUIRE(csa_run({"render", "--in", (d / "sequence.csv").string(), "--out", d.string()}).code == 0);
    const std::string svg = slurp(d / "pattern.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    // 800 px per unit side, R/2 = 0.025 -> 20 px.
    CHECK(svg.find("r=\"20\"") != std::string::npos);
    std::size_t circles = 0;
    for (auto pos = svg.find("<circle"); pos != std::string::npos; pos = svg.find("<circle", pos + 1)) ++circles;
    CHECK(circles == 20);
  }

  TEST_CASE("experiment minors and curves") {
    const fs::path d = fresh("exp");
    auto r = csa_run({"experiment", "minors", "--reps", "50", "--out", d.string()});
    REQUIRE(r.code == 0);
    const auto m = json_of(d / "minors.json");
    CHECK(m["max_relative_error"].get<double>() <= 1e-10);
    CHECK(m["cholesky_failures"] == 0);
    r = csa_run({"experiment", "curves", "--R", "0.05", "--beta", "4,10", "--m", "1", "--reps", "4", "--mu", "100",
                 "--h", "0.0025", "--nodes", "16", "--out", d.string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(d / "curves_m1.json"));
    CHECK(fs::exists(d / "curves_m1.csv"));
    CHECK(fs::exists(d / "curves_m1_integral.json"));
    r = csa_run({"experiment", "clt", "--R", "0.05", "--beta", "4,10", "--m", "1", "--reps", "5", "--mu", "50000",
                 "--h", "0.0025", "--out", d.string()});
    CHECK(r.code == 1);
  }

  TEST_CASE("pipeline recovers beta within its own interval in most runs") {
    int covered[2] = {0, 0};
    int runs = 0;
    for (int seed = 1; seed <= 50; ++seed) {
      const fs::path d = fresh("cover");
      REQUIRE(csa_run({"simulate", "--R", "0.02", "--beta", "300,500", "--until-jamming", "--seed",
                       std::to_string(seed), "--out", d.string()})
                  .code == 0);
      REQUIRE(csa_run({"replay", "--in", (d / "sequence.csv").string(), "--out", d.string()}).code == 0);
      const auto r = csa_run({"estimate", "--in", (d / "sequence.csv").string(), "--out", d.string()});
      ++runs;
      if (r.code != 0) continue;
      const auto bounds = json_of(d / "estimate.json")["intervals"]["bounds"];
      const double truth[2] = {300.0, 500.0};
      for (int j = 0; j < 2; ++j)
        covered[j] += bounds[std::size_t(j)][0].get<double>() <= truth[j] &&
                      truth[j] <= bounds[std::size_t(j)][1].get<double>();
    }
    CHECK(runs == 50);
    CHECK(covered[0] >= 45);
    CHECK(covered[1] >= 45);
  }
}
