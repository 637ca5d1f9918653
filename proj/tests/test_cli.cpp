#include "silver/cli/commands.hpp"
#include "silver/cli/config.hpp"
#include "silver/cli/experiment.hpp"
#include "silver/schedules.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace silver;
using namespace silver::cli;

namespace fs = std::filesystem;

namespace {

struct Output {
  int code;
  std::string out, err;
};

Output silverctl(std::vector<std::string> args) {
  args.insert(args.begin(), "silverctl");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("silver_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "exp.conf";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, sep);) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("schedule listing") {
  const Output k2 = silverctl({"schedule", "--k", "2"});
  CHECK(k2.code == 0);
  const auto l = lines(k2.out);
  REQUIRE(l.size() == 3);
  CHECK(std::stod(fields(l[0], '\t')[1]) == std::sqrt(2.0));
  CHECK(std::stod(fields(l[1], '\t')[1]) == 2.0);
  CHECK(std::stod(fields(l[2], '\t')[1]) == std::sqrt(2.0));

  const auto n5 = lines(silverctl({"schedule", "--n", "5"}).out);
  REQUIRE(n5.size() == 5);
  for (std::uint64_t i = 0; i < 5; ++i) CHECK(std::stod(fields(n5[i], '\t')[1]) == silver_step(i));

  const auto q = lines(silverctl({"schedule", "--k", "3", "--L", "4"}).out);
  for (std::uint64_t i = 0; i < q.size(); ++i)
    CHECK(std::stod(fields(q[i], '\t')[2]) == doctest::Approx(silver_step(i) / 4.0).epsilon(1e-15));

  const auto cf = lines(silverctl({"schedule", "--k", "4", "--closed-form"}).out);
  CHECK(fields(cf[0], '\t')[3] == "√2");
  CHECK(fields(cf[1], '\t')[3] == "2");
  CHECK(fields(cf[3], '\t')[3] == "2+√2");
  CHECK(fields(cf[7], '\t')[3] == "1+ρ^2");

  CHECK(silverctl({"schedule", "--k", "0"}).code == kExitUsage);
  CHECK(silverctl({"schedule"}).code == kExitUsage);
  CHECK(silverctl({"schedule", "--k", "2", "--n", "3"}).code == kExitUsage);
}

TEST_CASE("curvature command") {
  const Output a = silverctl({"curvature", "1,1"});
  CHECK(a.code == 0);
  CHECK(a.out.find("K(e12, f12)\t1.5\n") != std::string::npos);
  const Output b = silverctl({"curvature", "0.001,0.001,0.001"});
  CHECK(b.out.find("K(f12, f13)\t375") != std::string::npos);
  const Output c = silverctl({"curvature", "3"});
  CHECK(c.code == 0);
  CHECK(c.out.empty());
  CHECK(silverctl({"curvature", "1,0"}).code == kExitUsage);
  CHECK(silverctl({"curvature", "1,x"}).code == kExitUsage);
}

TEST_CASE("verify command") {
  const fs::path dir = scratch("verify");
  const Output g = silverctl({"verify", "geometry", "--samples", "50", "--out", dir.string()});
  CHECK(g.code == 0);
  CHECK(fs::exists(dir / "verify_report.txt"));
  CHECK(slurp(dir / "verify_report.txt") == g.out);

  const Output c = silverctl({"verify", "convexity", "--samples", "50", "--report", (dir / "c.txt").string()});
  CHECK(c.code == 0);
  CHECK(fs::exists(dir / "c.txt"));

  CHECK(silverctl({"verify", "nonsense", "--out", dir.string()}).code == kExitUsage);

  const Output strict = silverctl({"verify", "lemma52", "--objective", "rayleigh", "--manifold", "sphere", "--samples",
                             "20", "--out", dir.string()});
  const Output lenient = silverctl({"verify", "lemma52", "--objective", "rayleigh", "--manifold", "sphere", "--samples",
                              "20", "--informative", "--out", dir.string()});
  CHECK(lenient.code == 0);
  CHECK((strict.code == 0 || strict.code == kExitCertificate));
}

TEST_CASE("config parsing and diagnostics") {
  const ExperimentConfig c = parse_config(
      "# demo\nexperiment = bw_potential\nd = 4\nkappa = 1e3\nn = 63\nseeds = 0..2, 9\n"
      "arm = silver\narm = constant(1.99)\narm = restart(auto)\nthin = 2\nplot = true\n");
  CHECK(c.d == 4);
  CHECK(*c.kappa == 1e3);
  CHECK(c.seeds == std::vector<std::uint64_t>{0, 1, 2, 9});
  REQUIRE(c.arms.size() == 3);
  CHECK(c.arms[1].label() == "constant(1.99)");
  CHECK(c.arms[2].label() == "restart(auto)");
  CHECK(c.plot);

  auto error_of = [](const std::string& text) -> std::pair<std::size_t, std::string> {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return {e.line(), e.field()};
    }
    return {0, ""};
  };
  CHECK(error_of("experiment = bw_potential\nkappa = 10\nn = 0\n") == std::pair<std::size_t, std::string>{3, "n"});
  CHECK(error_of("kappa = 10\nbogus = 1\n") == std::pair<std::size_t, std::string>{2, "bogus"});
  CHECK(error_of("kappa = 10\nkappa = 20\n") == std::pair<std::size_t, std::string>{2, "kappa"});
  CHECK(error_of("kappa = 10\narm = constant(0)\n") == std::pair<std::size_t, std::string>{2, "arm"});
  CHECK(error_of("kappa = 10\narm = constant(-1)\n").second == "arm");
  CHECK(error_of("kappa = 10\narm = wobble\n").second == "arm");
  CHECK(error_of("kappa = 10\nseeds = 5..1\n") == std::pair<std::size_t, std::string>{2, "seeds"});
  CHECK(error_of("experiment = bw_potential\n").second == "kappa");
  CHECK(error_of("kappa = 10\nalpha = 0.1\n").second == "kappa");
  CHECK(error_of("experiment = rayleigh\narm = restart(auto)\n").second == "arm");
  CHECK(error_of("kappa = 10\nn = 100\narm = restart(3)\n").second == "arm");
  CHECK(error_of("kappa = 10\nd\n").first == 2);
  CHECK(error_of("experiment = rayleigh\nd = 1\n").second == "d");
}

TEST_CASE("run command writes CSVs and reports configuration errors") {
  const fs::path dir = scratch("run");
  const fs::path cfg = write_config(dir, "experiment = bw_potential\nd = 5\nkappa = 1e3\nn = 63\nseeds = 0..3\n"
                                         "arm = silver\narm = constant(1.0)\n");
  const Output r = silverctl({"run", cfg.string(), "--out", (dir / "a").string(), "--plot"});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "a" / "bw_potential.csv"));
  CHECK(fs::exists(dir / "a" / "bw_potential_summary.csv"));
  CHECK(fs::exists(dir / "a" / "bw_potential.svg"));

  const std::string csv = slurp(dir / "a" / "bw_potential.csv");
  CHECK(lines(csv).front() ==
        "seed,arm,iteration,step_size,objective_value,error,grad_norm_sq,dist_sq_to_ref,status");
  CHECK(lines(csv).size() == 1 + 4 * 2 * 64);

  // Plotting never changes the CSV.
  const Output r2 = silverctl({"run", cfg.string(), "--out", (dir / "b").string()});
  CHECK(r2.code == 0);
  CHECK(slurp(dir / "b" / "bw_potential.csv") == csv);
  CHECK_FALSE(fs::exists(dir / "b" / "bw_potential.svg"));

  const fs::path bad = write_config(dir, "experiment = bw_potential\nkappa = 10\nn = 0\n");
  const Output e = silverctl({"run", bad.string()});
  CHECK(e.code == kExitUsage);
  CHECK(e.err.find("line 3") != std::string::npos);
  CHECK(silverctl({"run", (dir / "missing.conf").string()}).code == kExitUsage);
}

TEST_CASE("run command exit code 2 only when every run diverges") {
  const fs::path dir = scratch("diverge");
  const fs::path all = write_config(dir, "experiment = bw_potential\nd = 3\nkappa = 1e3\nn = 3000\nseeds = 0,1\n"
                                         "arm = constant(2.5)\n");
  CHECK(silverctl({"run", all.string(), "--out", dir.string()}).code == kExitAllDiverged);
  const fs::path some = write_config(dir, "experiment = bw_potential\nd = 3\nkappa = 1e3\nn = 3000\nseeds = 0,1\n"
                                          "arm = constant(2.5)\narm = silver\n");
  CHECK(silverctl({"run", some.string(), "--out", dir.string()}).code == 0);
  const auto rows = parse_rows_csv(slurp(dir / "bw_potential.csv"));
  bool saw_diverged = false;
  for (const auto& r : rows) saw_diverged |= r.arm == "constant(2.5)" && r.status == "diverged";
  CHECK(saw_diverged);
}

TEST_CASE("CSV is deterministic and independent of worker count") {
  ExperimentConfig c = parse_config("experiment = rayleigh\nd = 20\nn = 200\nseeds = 0..5\narm = silver\n"
                                    "arm = constant(1.0)\nthin = 7\n");
  const std::string one = rows_csv(run_experiment(c, 1).rows);
  const std::string many = rows_csv(run_experiment(c, 4).rows);
  CHECK(one == many);
  CHECK(rows_csv(run_experiment(c, 1).rows) == one);
}

TEST_CASE("iterations strictly increase per run and thinning keeps the last row") {
  ExperimentConfig c = parse_config("kappa = 10\nd = 3\nn = 50\nseeds = 0,1\nthin = 8\n");
  const auto rows = run_experiment(c, 1).rows;
  std::vector<std::uint64_t> its;
  for (const auto& r : rows)
    if (r.seed == 0) its.push_back(r.iteration);
  CHECK(its == std::vector<std::uint64_t>{0, 8, 16, 24, 32, 40, 48, 50});
  CHECK_FALSE(rows.front().step_size.has_value());
  CHECK(rows[1].step_size.has_value());
}

TEST_CASE("summary is recomputable from the row CSV") {
  ExperimentConfig c = parse_config("kappa = 1e3\nd = 4\nn = 127\nseeds = 0..9\narm = silver\narm = constant(1.0)\n"
                                    "arm = constant(2.5)\n");
  const ExperimentResult res = run_experiment(c, 1);
  const std::string csv = rows_csv(res.rows);
  const auto parsed = parse_rows_csv(csv);
  CHECK(rows_csv(parsed) == csv);
  CHECK(summary_csv(summarize(parsed)) == summary_csv(res.summary));
  REQUIRE(res.summary.size() == 3);
  CHECK(res.summary[0].completed == 10);
  CHECK(res.summary[0].final_error_p2_5 <= res.summary[0].final_error_mean);
  CHECK(res.summary[0].final_error_mean <= res.summary[0].final_error_p97_5);
  CHECK(std::isnan(res.summary[2].final_error_mean) == (res.summary[2].completed == 0));
}

TEST_CASE("percentile interpolates linearly") {
  CHECK(percentile({3.0, 1.0, 2.0}, 50.0) == 2.0);
  CHECK(percentile({0.0, 10.0}, 2.5) == doctest::Approx(0.25));
  CHECK(percentile({4.0}, 97.5) == 4.0);
  CHECK(std::isnan(percentile({}, 50.0)));
}

TEST_CASE("meanfield runs record train and test MSE") {
  ExperimentConfig c = parse_config("experiment = meanfield\nwidth = 10\nsamples = 40\nL = 100\nn = 40\nthin = 10\n");
  const ExperimentResult res = run_experiment(c, 1);
  REQUIRE(res.mse.size() == 5);
  CHECK(res.mse.front().iteration == 0);
  CHECK(res.mse.back().iteration == 40);
  CHECK(res.mse.front().train_mse == doctest::Approx(res.rows.front().value));
  CHECK(lines(mse_csv(res.mse)).front() == "seed,arm,iteration,train_mse,test_mse");
}

TEST_CASE("svg rendering") {
  ExperimentConfig c = parse_config("kappa = 10\nd = 3\nn = 31\narm = silver\narm = constant(1.0)\n");
  const std::string svg = render_svg(run_experiment(c, 1).rows, "demo");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("constant(1)") != std::string::npos);
}

TEST_CASE("shipped config templates parse") {
  const fs::path dir = fs::path(SILVER_SOURCE_DIR) / "tools" / "configs";
  int count = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".conf") continue;
    CHECK_NOTHROW(load_config(entry.path().string()));
    ++count;
  }
  CHECK(count >= 6);
}
