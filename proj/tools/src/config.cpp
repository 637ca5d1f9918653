#include "silver/cli/config.hpp"

#include "silver/format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace silver::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_real(const std::string& v, std::size_t line, const std::string& field) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError(line, field, "expected a finite number, got '" + v + "'");
  return out;
}

std::uint64_t to_count(const std::string& v, std::size_t line, const std::string& field) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(line, field, "expected a non-negative integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v, std::size_t line, const std::string& field) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(line, field, "expected true or false, got '" + v + "'");
}

// "0,1,5" or "0..99" (inclusive), mixable: "0..9, 42".
std::vector<std::uint64_t> to_seeds(const std::string& v, std::size_t line) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(v);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (part.empty()) continue;
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_count(part, line, "seeds"));
      continue;
    }
    const auto lo = to_count(trim(part.substr(0, dots)), line, "seeds");
    const auto hi = to_count(trim(part.substr(dots + 2)), line, "seeds");
    if (hi < lo) throw ConfigError(line, "seeds", "empty range '" + part + "'");
    if (hi - lo > 1'000'000) throw ConfigError(line, "seeds", "range too large '" + part + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

}  // namespace

const char* to_string(ExperimentKind k) noexcept {
  switch (k) {
    case ExperimentKind::bw_potential: return "bw_potential";
    case ExperimentKind::rayleigh: return "rayleigh";
    case ExperimentKind::meanfield: return "meanfield";
    case ExperimentKind::custom: return "custom";
  }
  return "unknown";
}

std::string ArmSpec::label() const {
  switch (kind) {
    case ArmKind::silver: return "silver";
    case ArmKind::constant: return "constant(" + format_double(eta) + ")";
    case ArmKind::restart: return cycles ? "restart(" + std::to_string(*cycles) + ")" : "restart(auto)";
  }
  return "unknown";
}

ConfigError::ConfigError(std::size_t line, std::string field, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", field '" + field + "': " + message
                                  : "field '" + field + "': " + message),
      line_(line),
      field_(std::move(field)) {}

ArmSpec parse_arm(const std::string& raw) {
  const std::string text = trim(raw);
  ArmSpec a;
  if (text == "silver") return a;
  const auto open = text.find('(');
  if (open == std::string::npos || text.back() != ')')
    throw ConfigError(0, "arm", "expected silver, constant(eta) or restart(auto|cycles), got '" + text + "'");
  const std::string head = trim(text.substr(0, open));
  const std::string arg = trim(text.substr(open + 1, text.size() - open - 2));
  if (head == "constant") {
    a.kind = ArmKind::constant;
    a.eta = to_real(arg, 0, "arm");
    if (!(a.eta > 0.0)) throw ConfigError(0, "arm", "constant step must be positive, got " + arg);
    return a;
  }
  if (head == "restart") {
    a.kind = ArmKind::restart;
    if (arg != "auto") {
      a.cycles = to_count(arg, 0, "arm");
      if (*a.cycles == 0) throw ConfigError(0, "arm", "restart needs at least one cycle");
    }
    return a;
  }
  throw ConfigError(0, "arm", "unknown arm '" + head + "'");
}

double ExperimentConfig::condition_number() const {
  if (kappa) return *kappa;
  if (alpha) return L / *alpha;
  throw ConfigError(0, "kappa", "experiment needs kappa or alpha");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  std::map<std::string, std::size_t> seen;
  std::size_t last_arm_line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, body, "expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string v = trim(body.substr(eq + 1));
    if (v.empty()) throw ConfigError(line, key, "missing value");
    if (key != "arm") {
      if (auto it = seen.find(key); it != seen.end())
        throw ConfigError(line, key, "duplicate key (first set on line " + std::to_string(it->second) + ")");
      seen[key] = line;
    }

    if (key == "experiment") {
      if (v == "bw_potential") c.experiment = ExperimentKind::bw_potential;
      else if (v == "rayleigh") c.experiment = ExperimentKind::rayleigh;
      else if (v == "meanfield") c.experiment = ExperimentKind::meanfield;
      else if (v == "custom") c.experiment = ExperimentKind::custom;
      else throw ConfigError(line, key, "expected bw_potential, rayleigh, meanfield or custom, got '" + v + "'");
    } else if (key == "d") {
      c.d = static_cast<std::int64_t>(to_count(v, line, key));
    } else if (key == "kappa") {
      c.kappa = to_real(v, line, key);
    } else if (key == "alpha") {
      c.alpha = to_real(v, line, key);
    } else if (key == "L") {
      c.L = to_real(v, line, key);
    } else if (key == "n") {
      c.n = to_count(v, line, key);
    } else if (key == "seeds") {
      c.seeds = to_seeds(v, line);
    } else if (key == "arm") {
      last_arm_line = line;
      try {
        c.arms.push_back(parse_arm(v));
      } catch (const ConfigError& e) {
        throw ConfigError(line, "arm", std::string(e.what()).substr(std::string("field 'arm': ").size()));
      }
    } else if (key == "output_dir") {
      c.output_dir = v;
    } else if (key == "thin") {
      c.thin = to_count(v, line, key);
    } else if (key == "plot") {
      c.plot = to_bool(v, line, key);
    } else if (key == "rayleigh_kind") {
      if (v == "wigner") c.rayleigh = RayleighKind::wigner;
      else if (v == "spread") c.rayleigh = RayleighKind::spread;
      else throw ConfigError(line, key, "expected wigner or spread, got '" + v + "'");
    } else if (key == "target") {
      if (v == "sin") c.target = MeanFieldTarget::sin;
      else if (v == "teacher") c.target = MeanFieldTarget::teacher;
      else throw ConfigError(line, key, "expected sin or teacher, got '" + v + "'");
    } else if (key == "width") {
      c.width = to_count(v, line, key);
    } else if (key == "samples") {
      c.samples = to_count(v, line, key);
    } else if (key == "train_fraction") {
      c.train_fraction = to_real(v, line, key);
    } else {
      throw ConfigError(line, key, "unknown key");
    }
  }
  if (c.arms.empty()) c.arms.push_back(ArmSpec{});
  try {
    validate(c);
  } catch (const ConfigError& e) {
    // Point cross-field errors at the line that set the field, when there is one.
    const auto it = seen.find(e.field());
    const std::size_t at = it != seen.end() ? it->second : e.field() == "arm" ? last_arm_line : 0;
    if (at == 0) throw;
    const std::string prefix = "field '" + e.field() + "': ";
    throw ConfigError(at, e.field(), std::string(e.what()).substr(prefix.size()));
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(0, "path", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
  if (c.n < 1) throw ConfigError(0, "n", "n must be at least 1");
  if (c.seeds.empty()) throw ConfigError(0, "seeds", "seed list is empty");
  if (c.d < 1) throw ConfigError(0, "d", "dimension must be positive");
  if (c.thin < 1) throw ConfigError(0, "thin", "thin must be at least 1");
  if (!(c.L > 0.0)) throw ConfigError(0, "L", "L must be positive");
  if (c.kappa && c.alpha) throw ConfigError(0, "kappa", "give kappa or alpha, not both");
  if (c.kappa && !(*c.kappa >= 1.0)) throw ConfigError(0, "kappa", "kappa must be at least 1");
  if (c.alpha && !(*c.alpha > 0.0 && *c.alpha <= c.L)) throw ConfigError(0, "alpha", "alpha must lie in (0, L]");
  const bool strongly_convex = c.experiment == ExperimentKind::bw_potential || c.experiment == ExperimentKind::custom;
  if (strongly_convex && !c.kappa && !c.alpha) throw ConfigError(0, "kappa", "experiment needs kappa or alpha");
  if (c.experiment == ExperimentKind::rayleigh && c.d < 2) throw ConfigError(0, "d", "sphere needs d >= 2");
  if (c.experiment == ExperimentKind::meanfield) {
    if (c.width < 1) throw ConfigError(0, "width", "width must be positive");
    if (c.samples < 2) throw ConfigError(0, "samples", "need at least 2 samples");
    if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0))
      throw ConfigError(0, "train_fraction", "must lie in (0, 1)");
  }
  for (const auto& a : c.arms) {
    if (a.kind != ArmKind::restart) continue;
    if (!strongly_convex)
      throw ConfigError(0, "arm", std::string("restart arms need a strongly convex experiment, not ") + to_string(c.experiment));
    if (c.condition_number() <= 1.0) throw ConfigError(0, "arm", "restart arms need kappa > 1");
    if (a.cycles && c.n % *a.cycles != 0)
      throw ConfigError(0, "arm", "n = " + std::to_string(c.n) + " is not divisible by " + std::to_string(*a.cycles) + " restart cycles");
  }
}

}  // namespace silver::cli
