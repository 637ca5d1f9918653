#include "silver/cli/experiment.hpp"

#include "silver/format.hpp"
#include "silver/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

namespace silver::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Problem {
  ObjectivePtr objective;
  Point x0;
  std::optional<Dataset> test;  // mean-field only
};

Problem make_problem(const ExperimentConfig& c, std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(c.d);
  switch (c.experiment) {
    case ExperimentKind::bw_potential: {
      const double alpha = c.L / c.condition_number();
      auto f = std::make_shared<QuadraticPotentialBW>(make_m_star(d, seed), make_sigma_star(d, c.L, alpha, seed));
      return {f, Point::gaussian(Vector::Zero(d), SymMatrix::identity(d)), std::nullopt};
    }
    case ExperimentKind::rayleigh: {
      auto f = std::make_shared<RayleighSphere>(make_rayleigh_h(d, c.rayleigh, seed));
      CounterRng rng(seed, 31);
      return {f, Point::sphere(uniform_sphere(rng, d)), std::nullopt};
    }
    case ExperimentKind::meanfield: {
      MeanFieldProblem p = make_meanfield_problem(c.target, c.samples, c.train_fraction, seed);
      auto f = std::make_shared<MeanFieldNet>(c.width, std::move(p.train), c.L);
      return {f, Point::euclidean(make_meanfield_init(c.width, seed)), std::move(p.test)};
    }
    case ExperimentKind::custom: {
      // Euclidean quadratic with Hessian spectrum log-spaced on [alpha, L].
      const double alpha = c.L / c.condition_number();
      auto f = std::make_shared<EuclideanQuadratic>(make_sigma_star(d, 1.0 / alpha, 1.0 / c.L, seed),
                                                    make_m_star(d, seed));
      return {f, Point::euclidean(Vector::Zero(d)), std::nullopt};
    }
  }
  throw ConfigError(0, "experiment", "unsupported experiment");
}

StepSchedule make_schedule(const ExperimentConfig& c, const ArmSpec& arm) {
  switch (arm.kind) {
    case ArmKind::silver: return silver_prefix(c.n);
    case ArmKind::constant: return constant_schedule(arm.eta, c.n);
    case ArmKind::restart: {
      if (!arm.cycles) return restarted_schedule(split_budget(c.condition_number(), c.n));
      return restarted_schedule(c.n / *arm.cycles, *arm.cycles);
    }
  }
  throw ConfigError(0, "arm", "unsupported arm");
}

std::string csv_real(double v) { return format_double(v); }

std::string csv_opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

double parse_real(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return out;
}

std::uint64_t parse_count(const std::string& s) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("bad integer '" + s + "'");
  return out;
}

}  // namespace

namespace {

struct RunOutput {
  std::vector<RunRecord> rows;
  std::vector<MseRecord> mse;
  bool diverged = false;
};

RunOutput run_one(const ExperimentConfig& c, std::uint64_t seed, const ArmSpec& arm) {
  const Problem p = make_problem(c, seed);
  const auto ref = p.objective->reference();
  const double f_ref = ref ? ref->value : 0.0;
  RunOptions opt;
  opt.thin = c.thin;
  opt.track_distance = true;
  const Trajectory t =
      rgd_run(*p.objective, make_schedule(c, arm).with_smoothness(p.objective->smoothness()), p.x0, c.n, opt);

  RunOutput out;
  out.diverged = t.status == RunStatus::diverged;
  const std::string label = arm.label();
  const std::string status = to_string(t.status);
  const std::uint64_t last = t.updates();
  for (std::uint64_t i = 0; i <= last; ++i) {
    if (i % c.thin != 0 && i != last) continue;
    RunRecord r;
    r.seed = seed;
    r.arm = label;
    r.iteration = i;
    if (i > 0) r.step_size = t.applied_steps[i - 1];
    r.value = t.values[i];
    r.error = t.values[i] - f_ref;
    r.grad_norm_sq = t.grad_norm_sq[i];
    if (!t.dist_sq.empty()) r.dist_sq = t.dist_sq[i];
    r.status = status;
    out.rows.push_back(std::move(r));
  }
  if (p.test) {
    const auto& net = static_cast<const MeanFieldNet&>(*p.objective);
    for (std::size_t j = 0; j < t.points.size(); ++j) {
      const Vector& theta = t.points[j].coords();
      out.mse.push_back({seed, label, t.point_index[j], net.mse(theta, net.train()), net.mse(theta, *p.test)});
    }
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& c, unsigned workers) {
  validate(c);
  const std::size_t arms = c.arms.size();
  const std::size_t total = c.seeds.size() * arms;
  std::vector<RunOutput> outputs(total);
  std::vector<std::exception_ptr> errors(total);

  // Runs are independent; results land in (seed, arm) slots so output order
  // never depends on scheduling.
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t t = next++; t < total; t = next++) {
      try {
        outputs[t] = run_one(c, c.seeds[t / arms], c.arms[t % arms]);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExperimentResult out;
  std::size_t diverged = 0;
  for (auto& o : outputs) {
    diverged += o.diverged ? 1 : 0;
    std::move(o.rows.begin(), o.rows.end(), std::back_inserter(out.rows));
    std::move(o.mse.begin(), o.mse.end(), std::back_inserter(out.mse));
  }
  out.summary = summarize(out.rows);
  out.all_diverged = total > 0 && diverged == total;
  return out;
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const double pos = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::map<std::uint64_t, const RunRecord*>> last;
  for (const auto& r : rows) {
    if (!last.count(r.arm)) order.push_back(r.arm);
    last[r.arm][r.seed] = &r;  // rows are in iteration order per run
  }
  std::vector<SummaryRow> out;
  for (const auto& arm : order) {
    SummaryRow s;
    s.arm = arm;
    std::vector<double> finals;
    for (const auto& [seed, r] : last[arm]) {
      ++s.seeds;
      if (r->status == "completed") {
        ++s.completed;
        finals.push_back(r->error);
      } else if (r->status == "diverged") {
        ++s.diverged;
      } else {
        ++s.degenerate;
      }
    }
    if (finals.empty()) {
      s.final_error_mean = s.final_error_p2_5 = s.final_error_p97_5 = kNaN;
    } else {
      double sum = 0.0;
      for (double e : finals) sum += e;
      s.final_error_mean = sum / static_cast<double>(finals.size());
      s.final_error_p2_5 = percentile(finals, 2.5);
      s.final_error_p97_5 = percentile(finals, 97.5);
    }
    out.push_back(s);
  }
  return out;
}

std::string rows_csv(const std::vector<RunRecord>& rows) {
  std::string s = "seed,arm,iteration,step_size,objective_value,error,grad_norm_sq,dist_sq_to_ref,status\n";
  for (const auto& r : rows) {
    s += std::to_string(r.seed) + ',' + r.arm + ',' + std::to_string(r.iteration) + ',' + csv_opt(r.step_size) + ',' +
         csv_real(r.value) + ',' + csv_real(r.error) + ',' + csv_real(r.grad_norm_sq) + ',' + csv_opt(r.dist_sq) + ',' +
         r.status + '\n';
  }
  return s;
}

std::vector<RunRecord> parse_rows_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<RunRecord> out;
  if (!std::getline(in, line)) return out;  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 9) throw std::invalid_argument("run CSV row has " + std::to_string(f.size()) + " fields");
    RunRecord r;
    r.seed = parse_count(f[0]);
    r.arm = f[1];
    r.iteration = parse_count(f[2]);
    if (!f[3].empty()) r.step_size = parse_real(f[3]);
    r.value = parse_real(f[4]);
    r.error = parse_real(f[5]);
    r.grad_norm_sq = parse_real(f[6]);
    if (!f[7].empty()) r.dist_sq = parse_real(f[7]);
    r.status = f[8];
    out.push_back(std::move(r));
  }
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& summary) {
  std::string s = "arm,seeds,completed,diverged,degenerate_stop,final_error_mean,final_error_p2_5,final_error_p97_5\n";
  for (const auto& r : summary) {
    s += r.arm + ',' + std::to_string(r.seeds) + ',' + std::to_string(r.completed) + ',' + std::to_string(r.diverged) +
         ',' + std::to_string(r.degenerate) + ',' + csv_real(r.final_error_mean) + ',' + csv_real(r.final_error_p2_5) +
         ',' + csv_real(r.final_error_p97_5) + '\n';
  }
  return s;
}

std::string mse_csv(const std::vector<MseRecord>& mse) {
  std::string s = "seed,arm,iteration,train_mse,test_mse\n";
  for (const auto& r : mse) {
    s += std::to_string(r.seed) + ',' + r.arm + ',' + std::to_string(r.iteration) + ',' + csv_real(r.train_mse) + ',' +
         csv_real(r.test_mse) + '\n';
  }
  return s;
}

std::string render_svg(const std::vector<RunRecord>& rows, const std::string& title) {
  // arm -> iteration -> (sum, count) over completed runs
  std::vector<std::string> order;
  std::map<std::string, std::map<std::uint64_t, std::pair<double, int>>> acc;
  for (const auto& r : rows) {
    if (!acc.count(r.arm)) {
      order.push_back(r.arm);
      acc[r.arm];
    }
    if (r.status != "completed" || !std::isfinite(r.error)) continue;
    auto& cell = acc[r.arm][r.iteration];
    cell.first += r.error;
    cell.second += 1;
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  std::uint64_t max_it = 1;
  for (const auto& [arm, curve] : acc) {
    for (const auto& [it, c] : curve) {
      const double m = c.first / c.second;
      if (m > 0.0) {
        lo = std::min(lo, m);
        hi = std::max(hi, m);
      }
      max_it = std::max(max_it, it);
    }
  }
  if (!(hi > 0.0)) {
    lo = 1e-16;
    hi = 1.0;
  }
  const double ylo = std::floor(std::log10(lo)), yhi = std::max(ylo + 1.0, std::ceil(std::log10(hi)));
  const double W = 720, H = 440, ml = 70, mr = 160, mt = 40, mb = 50;
  const double pw = W - ml - mr, ph = H - mt - mb;
  auto px = [&](double it) { return ml + pw * it / static_cast<double>(max_it); };
  auto py = [&](double v) { return mt + ph * (yhi - std::log10(v)) / (yhi - ylo); };
  static const char* colors[] = {"#1b6ca8", "#d1495b", "#2e933c", "#edae49", "#6b3fa0", "#444444"};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << ml << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
  s << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (double e = ylo; e <= yhi; e += 1.0) {
    const double y = py(std::pow(10.0, e));
    s << "<line x1=\"" << ml << "\" x2=\"" << ml + pw << "\" y1=\"" << y << "\" y2=\"" << y << "\" stroke=\"#eee\"/>\n";
    s << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  s << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">iteration (0 to " << max_it
    << ")</text>\n";
  std::size_t k = 0;
  for (const auto& arm : order) {
    const char* col = colors[k % std::size(colors)];
    std::ostringstream pts;
    for (const auto& [it, c] : acc[arm]) {
      const double m = c.first / c.second;
      if (m > 0.0) pts << px(static_cast<double>(it)) << ',' << py(m) << ' ';
    }
    s << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    const double ly = mt + 16.0 * static_cast<double>(k) + 10.0;
    s << "<line x1=\"" << ml + pw + 12 << "\" x2=\"" << ml + pw + 32 << "\" y1=\"" << ly << "\" y2=\"" << ly
      << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << ml + pw + 38 << "\" y=\"" << ly + 4 << "\">" << arm << "</text>\n";
    ++k;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace silver::cli
