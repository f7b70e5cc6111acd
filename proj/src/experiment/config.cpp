#include "mfou/experiment/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "mfou/csv.hpp"
#include "mfou/error.hpp"
#include "mfou/numerics/parallel.hpp"

namespace mfou::experiment {

const char* to_string(TailSide s) noexcept { return s == TailSide::upper ? "upper" : "lower"; }

const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys{
      {"theta", "1", "> 0", "drift parameter of dX = -theta X dt + dB + dB^H"},
      {"H", "0.7", "each in (0, 1]", "Hurst indices (comma separated list)"},
      {"T", "5", "each > 0", "horizons (comma separated list)"},
      {"cells", "0", ">= 8, or 0", "grid cells per path; 0 derives them from cells_per_unit"},
      {"cells_per_unit", "50", "> 0", "cells per unit of time when cells = 0"},
      {"reps", "1000", ">= 1", "Monte Carlo replications per cell"},
      {"seed", "20240101", "unsigned 64-bit", "master seed"},
      {"mu", "0.25, 0.5, 1", "each > -theta^2/2", "tilts for K_T(mu)"},
      {"a", "", "same length as b", "first CGF coefficients (paired with b)"},
      {"b", "", "each < theta^2/2 for the limit", "second CGF coefficients"},
      {"x", "-1, 0, 1, 2", "any reals", "rate function arguments"},
      {"tail_x", "1.5", "any reals", "tail thresholds: sets (x, inf) or (-inf, x)"},
      {"tail_side", "upper", "upper | lower", "which tail the thresholds bound"},
      {"tilt", "auto", "auto | none | real", "importance sampling drift -phi; auto tilts cells with too few hits"},
      {"min_hits", "20", ">= 1", "plain hits below which auto tilting kicks in"},
      {"mc_reps", "0", ">= 0", "Monte Carlo replications for the cgf_convergence table (0 skips)"},
      {"bootstrap", "200", ">= 2", "bootstrap resamples for CGF standard errors"},
      {"threads", "0", ">= 0", "worker threads; 0 uses MFOU_THREADS or all cores"},
      {"experiment", "normality", "normality | tail_slopes | cgf_convergence | h_invariance",
       "experiment run by the experiment subcommand"},
      {"gate_var_low", "1.6", "real", "normality: lower bound on var of sqrt(T)(theta_hat - theta)"},
      {"gate_var_high", "2.4", "real", "normality: upper bound on the same variance"},
      {"gate_ks", "0.05", "> 0", "normality: largest KS distance to N(0, 2 theta)"},
      {"gate_slope_rel", "0.2", "> 0", "tail_slopes: relative tolerance of the fitted slope"},
      {"gate_pooled_se", "2", "> 0", "h_invariance: pairwise tolerance in pooled standard errors"},
      {"gate_limit", "0.05", "> 0", "cgf_convergence: distance to the limit at the largest T"},
      {"max_attrition", "0.001", "in [0, 1)", "share of failed replications above which a cell is invalid"},
  };
  return keys;
}

const std::vector<std::string>& config_sections() {
  static const std::vector<std::string> sections{"simulate", "kernel", "estimate", "cgf", "rate", "experiment"};
  return sections;
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(Errc::config_error, msg); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    fail("key '" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    fail("key '" + key + "': expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::string cell;
  std::istringstream in(text);
  while (std::getline(in, cell, ',')) out.push_back(parse_double(key, cell));
  return out;
}

std::string render_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += csv::number(v[i]);
  }
  return out;
}

struct Accessor {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class Field>
Accessor number_key(Field ExperimentConfig::*field, std::function<bool(double)> ok, const char* constraint) {
  return {[=](ExperimentConfig& c, const std::string& v) {
            const double x = parse_double("value", v);
            if (!ok(x)) fail(std::string("value '") + v + "' violates constraint: " + constraint);
            c.*field = static_cast<Field>(x);
          },
          [=](const ExperimentConfig& c) { return csv::number(static_cast<double>(c.*field)); }};
}

template <class Field>
Accessor count_key(Field ExperimentConfig::*field, std::uint64_t min) {
  return {[=](ExperimentConfig& c, const std::string& v) {
            const auto x = parse_uint("value", v);
            if (x < min) fail("value '" + v + "' must be at least " + std::to_string(min));
            c.*field = static_cast<Field>(x);
          },
          [=](const ExperimentConfig& c) { return std::to_string(c.*field); }};
}

Accessor list_key(std::vector<double> ExperimentConfig::*field, std::function<bool(double)> ok, const char* constraint,
                  bool allow_empty) {
  return {[=](ExperimentConfig& c, const std::string& v) {
            auto list = parse_list("value", v);
            if (list.empty() && !allow_empty) fail("list must not be empty");
            for (double x : list)
              if (!ok(x)) fail("value " + csv::number(x) + " violates constraint: " + constraint);
            c.*field = std::move(list);
          },
          [=](const ExperimentConfig& c) { return render_list(c.*field); }};
}

const std::map<std::string, Accessor>& accessors() {
  static const std::map<std::string, Accessor> table = [] {
    auto any = [](double x) { return std::isfinite(x); };
    auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
    std::map<std::string, Accessor> t;
    t["theta"] = number_key(&ExperimentConfig::theta, positive, "theta > 0");
    t["H"] = list_key(&ExperimentConfig::hurst, [](double h) { return h > 0.0 && h <= 1.0; }, "H in (0, 1]", false);
    t["T"] = list_key(&ExperimentConfig::horizons, positive, "T > 0", false);
    t["cells"] = {[](ExperimentConfig& c, const std::string& v) {
                    const auto n = parse_uint("cells", v);
                    if (n != 0 && n < 8) fail("key 'cells' violates constraint: >= 8, or 0");
                    c.cells = n;
                  },
                  [](const ExperimentConfig& c) { return std::to_string(c.cells); }};
    t["cells_per_unit"] = number_key(&ExperimentConfig::cells_per_unit, positive, "cells_per_unit > 0");
    t["reps"] = count_key(&ExperimentConfig::reps, 1);
    t["seed"] = count_key(&ExperimentConfig::seed, 0);
    t["mu"] = list_key(&ExperimentConfig::mu, any, "finite", true);
    t["a"] = list_key(&ExperimentConfig::a, any, "finite", true);
    t["b"] = list_key(&ExperimentConfig::b, any, "finite", true);
    t["x"] = list_key(&ExperimentConfig::x, any, "finite", true);
    t["tail_x"] = list_key(&ExperimentConfig::tail_x, any, "finite", true);
    t["tail_side"] = {[](ExperimentConfig& c, const std::string& v) {
                        const std::string s = trim(v);
                        if (s == "upper") c.tail_side = TailSide::upper;
                        else if (s == "lower") c.tail_side = TailSide::lower;
                        else fail("key 'tail_side' must be upper or lower, got '" + v + "'");
                      },
                      [](const ExperimentConfig& c) { return std::string(to_string(c.tail_side)); }};
    t["tilt"] = {[](ExperimentConfig& c, const std::string& v) {
                   const std::string s = trim(v);
                   if (s != "auto" && s != "none") parse_double("tilt", s);
                   c.tilt = s;
                 },
                 [](const ExperimentConfig& c) { return c.tilt; }};
    t["min_hits"] = count_key(&ExperimentConfig::min_hits, 1);
    t["mc_reps"] = count_key(&ExperimentConfig::mc_reps, 0);
    t["bootstrap"] = count_key(&ExperimentConfig::bootstrap, 2);
    t["threads"] = count_key(&ExperimentConfig::threads, 0);
    t["experiment"] = {[](ExperimentConfig& c, const std::string& v) {
                         const std::string s = trim(v);
                         static const std::set<std::string> names{"normality", "tail_slopes", "cgf_convergence",
                                                                  "h_invariance"};
                         if (!names.count(s)) fail("key 'experiment': unknown experiment '" + v + "'");
                         c.experiment = s;
                       },
                       [](const ExperimentConfig& c) { return c.experiment; }};
    t["gate_var_low"] = number_key(&ExperimentConfig::gate_var_low, any, "finite");
    t["gate_var_high"] = number_key(&ExperimentConfig::gate_var_high, any, "finite");
    t["gate_ks"] = number_key(&ExperimentConfig::gate_ks, positive, "> 0");
    t["gate_slope_rel"] = number_key(&ExperimentConfig::gate_slope_rel, positive, "> 0");
    t["gate_pooled_se"] = number_key(&ExperimentConfig::gate_pooled_se, positive, "> 0");
    t["gate_limit"] = number_key(&ExperimentConfig::gate_limit, positive, "> 0");
    t["max_attrition"] = number_key(&ExperimentConfig::max_attrition, [](double x) { return x >= 0.0 && x < 1.0; },
                                    "in [0, 1)");
    return t;
  }();
  return table;
}

}  // namespace

void set_key(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const auto it = accessors().find(key);
  if (it == accessors().end()) fail("unknown config key '" + key + "'");
  try {
    it->second.set(config, value);
  } catch (const Error& e) {
    fail("key '" + key + "': " + e.what());
  }
}

std::size_t ExperimentConfig::cells_for(double horizon) const {
  if (cells != 0) return cells;
  return std::max<std::size_t>(8, static_cast<std::size_t>(std::llround(horizon * cells_per_unit)));
}

unsigned ExperimentConfig::thread_budget() const { return threads ? threads : default_thread_budget(); }

std::optional<double> ExperimentConfig::tilt_value() const {
  if (tilt == "auto" || tilt == "none") return std::nullopt;
  return parse_double("tilt", tilt);
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& k : config_keys()) {
    out += k.name;
    out += " = ";
    out += accessors().at(k.name).get(*this);
    out += '\n';
  }
  return out;
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(std::istream& in, const std::string& subcommand, const std::string& source) {
  ExperimentConfig config;
  std::vector<std::pair<std::string, std::string>> common, specific;
  std::map<std::string, std::set<std::string>> seen;
  std::string section, line;
  const auto& sections = config_sections();
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string where = source + ":" + std::to_string(lineno);
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') fail(where + ": malformed section header '" + body + "'");
      section = trim(body.substr(1, body.size() - 2));
      if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
        fail(where + ": unknown section '" + section + "'");
      }
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail(where + ": expected 'key = value', got '" + body + "'");
    const std::string key = trim(body.substr(0, eq)), value = trim(body.substr(eq + 1));
    if (!accessors().count(key)) fail(where + ": unknown config key '" + key + "'");
    if (!seen[section].insert(key).second) fail(where + ": duplicate key '" + key + "'");
    // Values in sections for other subcommands are still checked.
    ExperimentConfig scratch;
    try {
      set_key(scratch, key, value);
    } catch (const Error& e) {
      fail(where + ": " + e.what());
    }
    if (section.empty()) common.emplace_back(key, value);
    else if (section == subcommand) specific.emplace_back(key, value);
  }
  for (const auto& [k, v] : common) set_key(config, k, v);
  for (const auto& [k, v] : specific) set_key(config, k, v);
  return config;
}

ExperimentConfig load_config(const std::string& path, const std::string& subcommand) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config_error, "cannot open config file '" + path + "'");
  return parse_config(in, subcommand, path);
}

void apply_overrides(ExperimentConfig& config, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) fail("override '" + o + "' is not key=value");
    set_key(config, trim(o.substr(0, eq)), o.substr(eq + 1));
  }
}

std::vector<std::string> hurst_warnings(const ExperimentConfig& c) {
  std::vector<std::string> out;
  for (double h : c.hurst) {
    if (h < 0.5) out.push_back("H=" + csv::brief(h) + " is below 1/2: the kernel solver is experimental there");
    if (h == 1.0) out.push_back("H=1: fBm is simulated as B^1_t = t xi with xi standard normal");
  }
  return out;
}

std::vector<std::string> tail_hit_warnings(const ExperimentConfig& c) {
  std::vector<std::string> out;
  for (double x0 : c.tail_x)
    for (double T : c.horizons) {
      const boost::math::normal law(c.theta, std::sqrt(2.0 * c.theta / T));
      const double p = c.tail_side == TailSide::upper ? boost::math::cdf(boost::math::complement(law, x0))
                                                      : boost::math::cdf(law, x0);
      const double expected = p * static_cast<double>(c.reps);
      if (expected < static_cast<double>(c.min_hits)) {
        out.push_back("tail x=" + csv::brief(x0) + " T=" + csv::brief(T) + ": about " + csv::brief(expected) +
                      " plain hits expected, below min_hits=" + std::to_string(c.min_hits));
      }
    }
  return out;
}

void validate(const ExperimentConfig& c) {
  if (!(c.theta > 0.0)) fail("theta must be > 0");
  for (double h : c.hurst)
    if (!(h > 0.0 && h <= 1.0)) fail("H must lie in (0, 1], got " + csv::number(h));
  for (double t : c.horizons)
    if (!(t > 0.0)) fail("T must be > 0, got " + csv::number(t));
  for (double m : c.mu)
    if (!(m > -c.theta * c.theta / 2.0)) {
      fail("mu must exceed -theta^2/2 = " + csv::number(-c.theta * c.theta / 2.0) + ", got " + csv::number(m));
    }
  if (c.a.size() != c.b.size()) fail("keys 'a' and 'b' must have the same length");
  if (c.gate_var_low > c.gate_var_high) fail("gate_var_low exceeds gate_var_high");
}

}  // namespace mfou::experiment
