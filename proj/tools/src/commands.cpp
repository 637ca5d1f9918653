#include "silver/cli/commands.hpp"

#include "silver/certify.hpp"
#include "silver/cli/config.hpp"
#include "silver/cli/experiment.hpp"
#include "silver/error.hpp"
#include "silver/format.hpp"

#include <CLI11.hpp>

#include <bit>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace silver::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto b = part.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = part.find_last_not_of(" \t");
    out.push_back(part.substr(b, e - b + 1));
  }
  return out;
}

bool write_file(const fs::path& path, const std::string& content, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  f << content;
  f.close();
  if (!f) {
    err << "error: cannot write " << path.string() << "\n";
    return false;
  }
  return true;
}

bool ensure_dir(const fs::path& dir, std::ostream& err) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    err << "error: cannot create directory " << dir.string() << ": " << ec.message() << "\n";
    return false;
  }
  return true;
}

std::optional<ManifoldKind> parse_manifold(const std::string& s) {
  if (s == "euclidean") return ManifoldKind::euclidean;
  if (s == "sphere") return ManifoldKind::sphere;
  if (s == "bw" || s == "bures_wasserstein") return ManifoldKind::bures_wasserstein;
  return std::nullopt;
}

}  // namespace

std::string closed_form_label(std::uint64_t index) {
  const int v = std::countr_zero(index + 1);
  if (v == 0) return "√2";
  if (v == 1) return "2";
  if (v == 2) return "2+√2";
  return "1+ρ^" + std::to_string(v - 1);
}

int cmd_schedule(const ScheduleArgs& args, std::ostream& out, std::ostream& err) {
  if (args.k.has_value() == args.n.has_value()) {
    err << "error: give exactly one of --k or --n\n";
    return kExitUsage;
  }
  if (!(args.L > 0.0) || !std::isfinite(args.L)) {
    err << "error: --L must be a positive number\n";
    return kExitUsage;
  }
  try {
    StepSchedule s = args.k ? silver_schedule(*args.k) : silver_prefix(*args.n);
    s = s.with_smoothness(args.L);
    if (s.size() > (std::uint64_t{1} << 24)) {
      err << "error: refusing to print more than 2^24 entries\n";
      return kExitUsage;
    }
    std::string buf;
    for (std::uint64_t i = 0; i < s.size(); ++i) {
      buf += std::to_string(i) + '\t' + format_double(s.entry(i)) + '\t' + format_double(s.applied(i));
      if (args.closed_form) buf += '\t' + closed_form_label(i);
      buf += '\n';
    }
    out << buf;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_run(const RunArgs& args, const GlobalOptions& global, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  try {
    config = load_config(args.config_path);
    if (global.seed) config.seeds = {*global.seed};
    if (global.out) config.output_dir = *global.out;
    if (global.plot) config.plot = true;
    validate(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  ExperimentResult result;
  try {
    result = run_experiment(config, args.workers);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const fs::path dir(config.output_dir);
  if (!ensure_dir(dir, err)) return kExitUsage;
  const std::string stem = to_string(config.experiment);
  if (!write_file(dir / (stem + ".csv"), rows_csv(result.rows), err)) return kExitUsage;
  if (!write_file(dir / (stem + "_summary.csv"), summary_csv(result.summary), err)) return kExitUsage;
  if (!result.mse.empty() && !write_file(dir / (stem + "_mse.csv"), mse_csv(result.mse), err)) return kExitUsage;
  if (config.plot) {
    // A failed plot is reported but changes neither the CSVs nor the exit code.
    std::ostringstream sink;
    if (!write_file(dir / (stem + ".svg"), render_svg(result.rows, stem + " mean error"), sink))
      err << "warning: " << sink.str();
  }

  out << summary_csv(result.summary);
  if (result.all_diverged) {
    err << "every run diverged\n";
    return kExitAllDiverged;
  }
  return kExitOk;
}

int cmd_verify(const VerifyArgs& args, const GlobalOptions& global, std::ostream& out, std::ostream& err) {
  std::vector<std::string> suites;
  for (const auto& s : args.suites)
    for (auto& part : split_list(s)) suites.push_back(std::move(part));
  if (suites.empty()) {
    err << "error: no suite given; known suites:";
    for (const auto& n : suite_names()) err << ' ' << n;
    err << "\n";
    return kExitUsage;
  }
  for (const auto& s : suites) {
    const auto& known = suite_names();
    if (std::find(known.begin(), known.end(), s) == known.end()) {
      err << "error: unknown suite '" << s << "'\n";
      return kExitUsage;
    }
  }

  SuiteOptions opt;
  if (args.manifold) {
    opt.manifold = parse_manifold(*args.manifold);
    if (!opt.manifold) {
      err << "error: unknown manifold '" << *args.manifold << "' (euclidean, sphere, bw)\n";
      return kExitUsage;
    }
  }
  opt.objective = args.objective;
  opt.scale = args.scale;

  std::vector<CertificateReport> reports;
  try {
    reports = run_suite(suites, global.seed.value_or(0), args.samples, opt);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::string text = serialize_reports(reports);
  fs::path report_path;
  if (args.report) {
    report_path = *args.report;
  } else {
    const fs::path dir(global.out.value_or("out"));
    if (!ensure_dir(dir, err)) return kExitUsage;
    report_path = dir / "verify_report.txt";
  }
  if (report_path.has_parent_path() && !ensure_dir(report_path.parent_path(), err)) return kExitUsage;
  const bool written = write_file(report_path, text, err);
  out << text;

  bool ok = true;
  for (const auto& r : reports)
    if (!r.pass && !(global.informative && r.informative)) ok = false;
  if (!ok) return kExitCertificate;
  return written ? kExitOk : kExitUsage;
}

int cmd_curvature(const std::string& eigenvalues, std::ostream& out, std::ostream& err) {
  const auto parts = split_list(eigenvalues);
  if (parts.empty()) {
    err << "error: empty eigenvalue list\n";
    return kExitUsage;
  }
  Vector lambdas(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    double v = 0.0;
    const auto& p = parts[i];
    const auto [end, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
    if (ec != std::errc() || end != p.data() + p.size()) {
      err << "error: not a number: '" << p << "'\n";
      return kExitUsage;
    }
    if (!(v > 0.0) || !std::isfinite(v)) {
      err << "error: eigenvalues must be positive, got " << p << "\n";
      return kExitUsage;
    }
    lambdas(static_cast<Eigen::Index>(i)) = v;
  }
  try {
    for (const auto& e : curvature_table(lambdas)) out << curvature_label(e) << '\t' << format_double(e.value) << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Silver step-size Riemannian gradient descent: experiments and certificates", "silverctl"};
  app.require_subcommand(1);

  GlobalOptions global;
  std::uint64_t seed = 0;
  std::string out_dir;
  auto* seed_opt = app.add_option("--seed", seed, "Seed (overrides the config seed list for run)");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--plot", global.plot, "Also write an SVG chart");
  app.add_flag("--informative", global.informative, "Informative certificate failures do not fail verify");

  ScheduleArgs sched;
  auto* schedule = app.add_subcommand("schedule", "Print silver step sizes");
  schedule->add_option("--k", sched.k, "Level; prints 2^k - 1 entries");
  schedule->add_option("--n", sched.n, "Prefix length of the infinite schedule");
  schedule->add_option("--L", sched.L, "Smoothness; third column is eta / L");
  schedule->add_flag("--closed-form", sched.closed_form, "Annotate each entry with its closed form");
  schedule->fallthrough();

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  run_cmd->add_option("config", run.config_path, "Config file")->required();
  run_cmd->add_option("--jobs", run.workers, "Worker threads (0: hardware concurrency)");
  run_cmd->fallthrough();

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run certificate suites");
  verify_cmd->add_option("suites", verify.suites, "Suite names, comma separated or repeated")->required();
  verify_cmd->add_option("--samples", verify.samples, "Samples per certificate");
  verify_cmd->add_option("--manifold", verify.manifold, "euclidean, sphere or bw");
  verify_cmd->add_option("--objective", verify.objective, "bw_quadratic, rayleigh or euclidean_quadratic");
  verify_cmd->add_option("--scale", verify.scale, "Tangent sampling scale");
  verify_cmd->add_option("--report", verify.report, "Report path");
  verify_cmd->fallthrough();

  std::string lambdas;
  auto* curv = app.add_subcommand("curvature", "Bures-Wasserstein sectional curvatures at a spectrum");
  curv->add_option("eigenvalues", lambdas, "Comma-separated eigenvalues, e.g. 1,1")->required();
  curv->fallthrough();

  std::vector<const char*> raw;
  raw.reserve(argv.size());
  for (const auto& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (*seed_opt) global.seed = seed;
  if (*out_opt) global.out = out_dir;

  if (*schedule) return cmd_schedule(sched, out, err);
  if (*run_cmd) return cmd_run(run, global, out, err);
  if (*verify_cmd) return cmd_verify(verify, global, out, err);
  return cmd_curvature(lambdas, out, err);
}

}  // namespace silver::cli
