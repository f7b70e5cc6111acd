#include "mfou/experiment/harness.hpp"

#include <algorithm>
#include <bit>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "mfou/csv.hpp"
#include "mfou/error.hpp"
#include "mfou/ldp/analytic.hpp"
#include "mfou/ldp/riccati.hpp"

namespace mfou::experiment {

using csv::number;
using csv::brief;

KernelCache::KernelCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {}

std::filesystem::path KernelCache::file_for(const ProcessSpec& spec) const {
  const std::string name = "kernel_H" + number(spec.hurst) + "_T" + number(spec.grid.horizon()) + "_n" +
                           std::to_string(spec.grid.cells()) + "_v" + std::to_string(kKernelSchemeVersion) + ".bin";
  return dir_ ? *dir_ / name : std::filesystem::path(name);
}

std::shared_ptr<const TransferKernel> KernelCache::get(const ProcessSpec& spec) {
  std::lock_guard<std::mutex> lock(guard_);
  const auto key = std::make_tuple(spec.hurst, spec.grid.horizon(), spec.grid.cells());
  if (auto it = memory_.find(key); it != memory_.end()) return it->second;

  std::shared_ptr<const TransferKernel> kernel;
  if (dir_) {
    std::ifstream in(file_for(spec), std::ios::binary);
    if (in) {
      try {
        kernel = std::make_shared<const TransferKernel>(load_kernel(in, spec));
        ++disk_hits_;
      } catch (const Error&) {
        kernel.reset();
      }
    }
  }
  if (!kernel) {
    kernel = std::make_shared<const TransferKernel>(build_kernel(spec));
    ++builds_;
    if (dir_) {
      std::error_code ec;
      std::filesystem::create_directories(*dir_, ec);
      const auto path = file_for(spec);
      const auto tmp = path.string() + ".tmp";
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::io_error, "cannot write " + tmp);
        save_kernel(out, *kernel);
      }
      std::filesystem::rename(tmp, path, ec);
      if (ec) throw Error(Errc::io_error, "cannot write " + path.string() + ": " + ec.message());
    }
  }
  memory_.emplace(key, kernel);
  return kernel;
}

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

std::uint64_t tag(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t cell_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(master);
  for (auto p : parts) h = mix(h ^ p);
  return h;
}

double ks_distance_normal(std::vector<double> samples, double sd) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const boost::math::normal_distribution<double> dist(0.0, sd);
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = boost::math::cdf(dist, samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

LinearFit weighted_fit(std::span<const double> x, std::span<const double> y, std::span<const double> variance) {
  if (x.size() != y.size() || x.size() != variance.size()) throw Error(Errc::length_mismatch, "weighted_fit");
  LinearFit fit;
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / variance[i];
    sw += w;
    sx += w * x[i];
    sy += w * y[i];
  }
  const double xm = sx / sw, ym = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / variance[i];
    sxx += w * (x[i] - xm) * (x[i] - xm);
    sxy += w * (x[i] - xm) * (y[i] - ym);
  }
  fit.slope = sxy / sxx;
  fit.slope_se = std::sqrt(1.0 / sxx);
  fit.intercept = ym - fit.slope * xm;
  return fit;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
double infimum_over_tail(double x0, TailSide side, double theta, F&& rate) {
  // Dense scan of 20θ beyond the threshold, then golden refinement around the best point.
  const double dir = side == TailSide::upper ? 1.0 : -1.0;
  const double span = 20.0 * theta, step = span / 4000.0;
  double best = rate(x0), best_x = x0;
  for (int k = 1; k <= 4000; ++k) {
    const double x = x0 + dir * k * step;
    const double v = rate(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  if (!std::isfinite(best) || best_x == x0) return best;
  double lo = best_x - step, hi = best_x + step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    if (rate(c) < rate(d)) hi = d;
    else lo = c;
  }
  return std::min(best, rate(0.5 * (lo + hi)));
}

std::string flag(bool b) { return b ? "1" : "0"; }

void progress(const RunContext& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << std::endl;
}

std::shared_ptr<const TransferKernel> kernel_for(const ProcessSpec& spec, const RunContext& ctx) {
  if (ctx.cache) return ctx.cache->get(spec);
  return std::make_shared<const TransferKernel>(build_kernel(spec));
}

EstimationPipeline pipeline_for(const ExperimentConfig& c, double hurst, double horizon, const RunContext& ctx) {
  const ProcessSpec spec{hurst, c.theta, TimeGrid(horizon, c.cells_for(horizon))};
  return EstimationPipeline(spec, *kernel_for(spec, ctx));
}

}  // namespace

double printed_rate_infimum(double x0, TailSide side, double theta) {
  return infimum_over_tail(x0, side, theta, [&](double x) { return ldp::rate_function_printed(x, theta); });
}

double numeric_rate_infimum(double x0, TailSide side, double theta, ldp::SignConvention convention) {
  return infimum_over_tail(x0, side, theta, [&](double x) {
    const auto r = ldp::rate_function_numeric({x, theta, convention});
    return r.unbounded_below ? kInf : r.value;
  });
}

ExperimentReport run_normality(const ExperimentConfig& c, const RunContext& ctx) {
  validate(c);
  ExperimentReport report;
  report.experiment = "normality";
  Table main{"normality", {"H", "T", "reps", "var_scaled", "ks_dist", "pass"}, {}};
  Table detail{"normality_summary",
               {"H", "T", "n", "reps", "attempted", "attrition", "mean_scaled", "mean_se", "var_scaled", "ks_dist",
                "valid", "pass"},
               {}};
  Table quant{"normality_quantiles", {"H", "T", "p", "empirical", "normal"}, {}};
  const double sd = std::sqrt(2.0 * c.theta);
  const boost::math::normal_distribution<double> target(0.0, sd);
  report.summary["cells"] = nlohmann::ordered_json::array();

  for (double h : c.hurst) {
    for (double T : c.horizons) {
      const auto pipe = pipeline_for(c, h, T, ctx);
      const auto batch = ldp::simulate_estimates(pipe, cell_seed(c.seed, {tag("normality"), bits(h), bits(T)}), c.reps,
                                                 c.thread_budget());
      std::vector<double> s;
      s.reserve(batch.records.size());
      for (const auto& r : batch.records) s.push_back(std::sqrt(T) * (r.theta_hat - c.theta));
      const double m = static_cast<double>(s.size());
      double mean = 0.0;
      for (double v : s) mean += v;
      mean /= m;
      double var = 0.0;
      for (double v : s) var += (v - mean) * (v - mean);
      var /= (m - 1.0);
      const double ks = ks_distance_normal(s, sd);
      const double attrition = static_cast<double>(batch.degenerate) / static_cast<double>(c.reps);
      const bool valid = attrition <= c.max_attrition;
      const bool pass = valid && var >= c.gate_var_low && var <= c.gate_var_high && ks <= c.gate_ks;
      const std::size_t n = c.cells_for(T);

      main.add({number(h), number(T), std::to_string(s.size()), number(var), number(ks), flag(pass)});
      detail.add({number(h), number(T), std::to_string(n), std::to_string(s.size()), std::to_string(c.reps),
                  number(attrition), number(mean), number(std::sqrt(var / m)), number(var), number(ks), flag(valid),
                  flag(pass)});
      std::vector<double> sorted = s;
      std::sort(sorted.begin(), sorted.end());
      for (double p : {0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99}) {
        const double pos = p * (m - 1.0);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        const double q = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
        quant.add({number(h), number(T), number(p), number(q), number(boost::math::quantile(target, p))});
      }
      report.gates.push_back({"normality H=" + brief(h) + " T=" + brief(T), pass,
                              "var " + brief(var) + " (gate [" + brief(c.gate_var_low) + ", " +
                                  brief(c.gate_var_high) + "]), ks " + brief(ks) + " (gate " + brief(c.gate_ks) +
                                  "), mean " + brief(mean) + " +- " + brief(std::sqrt(var / m))});
      report.summary["cells"].push_back({{"H", h},
                                         {"T", T},
                                         {"n", n},
                                         {"reps", s.size()},
                                         {"mean_scaled", mean},
                                         {"var_scaled", var},
                                         {"ks_dist", ks},
                                         {"attrition", attrition},
                                         {"pass", pass}});
      progress(ctx, "normality H=" + brief(h) + " T=" + brief(T) + " var=" + brief(var) + " ks=" + brief(ks));
    }
  }
  report.tables = {main, detail, quant};
  return report;
}

std::pair<std::vector<TailCell>, TailFit> tail_study(const ExperimentConfig& c, double hurst, double x0,
                                                     const RunContext& ctx) {
  const bool upper = c.tail_side == TailSide::upper;
  std::vector<TailCell> cells;
  TailFit fit{hurst, x0, c.tail_side, {}, {}, 0.0, 0.0, 0.0, true};
  for (double T : c.horizons) {
    const auto pipe = pipeline_for(c, hurst, T, ctx);
    TailCell cell{hurst, x0, T, c.cells_for(T), {}, c.reps, 0};
    const auto seed_parts = {tag("tail"), bits(hurst), bits(x0), bits(T), static_cast<std::uint64_t>(upper)};
    auto tilted = [&](double phi) {
      const auto batch = ldp::simulate_estimates(pipe, cell_seed(c.seed, {tag("tilted"), bits(hurst), bits(x0), bits(T)}),
                                                 c.reps, c.thread_budget(), -phi);
      cell.degenerate = batch.degenerate;
      cell.estimate = ldp::tail_probability_tilted(batch.records, c.theta, phi, x0, upper);
    };
    if (const auto phi = c.tilt_value()) {
      tilted(*phi);
    } else {
      const auto batch = ldp::simulate_estimates(pipe, cell_seed(c.seed, seed_parts), c.reps, c.thread_budget());
      cell.degenerate = batch.degenerate;
      cell.estimate = ldp::tail_probability(batch.records, x0, upper);
      // Centre the simulated estimator on the threshold: drift x0 means φ = −x0.
      if (c.tilt == "auto" && cell.estimate.hits < c.min_hits) tilted(-x0);
    }
    if (static_cast<double>(cell.degenerate) / static_cast<double>(c.reps) > c.max_attrition) fit.valid = false;
    progress(ctx, "tail H=" + brief(hurst) + " x=" + brief(x0) + " T=" + brief(T) + " p=" +
                      brief(cell.estimate.probability) + " hits=" + std::to_string(cell.estimate.hits));
    cells.push_back(cell);
  }

  std::vector<double> t, y, yc, var;
  for (const auto& cell : cells) {
    const auto& e = cell.estimate;
    if (!(e.probability > 0.0) || e.hits < 2) {
      fit.valid = false;
      continue;
    }
    t.push_back(cell.horizon);
    y.push_back(std::log(e.probability));
    yc.push_back(std::log(e.probability) + 0.5 * std::log(cell.horizon));
    var.push_back(std::pow(e.std_error / e.probability, 2));
  }
  if (t.size() >= 2) {
    fit.raw = weighted_fit(t, y, var);
    fit.corrected = weighted_fit(t, yc, var);
  } else {
    fit.valid = false;
    fit.raw.slope = fit.corrected.slope = std::numeric_limits<double>::quiet_NaN();
  }
  fit.rate_printed = printed_rate_infimum(x0, c.tail_side, c.theta);
  fit.rate_numeric_printed = numeric_rate_infimum(x0, c.tail_side, c.theta, ldp::SignConvention::printed);
  fit.rate_numeric_chernoff = numeric_rate_infimum(x0, c.tail_side, c.theta, ldp::SignConvention::chernoff);
  return {cells, fit};
}

namespace {

const std::vector<std::string> kTailCellColumns{"H",    "side",    "x",       "T",   "n",      "reps", "hits",
                                                "p",    "p_se",    "ci_low",  "ci_high", "ess", "method", "drift"};
const std::vector<std::string> kTailFitColumns{"H",
                                               "side",
                                               "x",
                                               "slope",
                                               "slope_se",
                                               "slope_corrected",
                                               "slope_corrected_se",
                                               "rate_printed_formula",
                                               "rate_numeric_printed_convention",
                                               "rate_numeric_chernoff_convention",
                                               "rel_error_chernoff",
                                               "valid",
                                               "pass"};

void add_tail_rows(Table& cells_table, Table& fit_table, const std::vector<TailCell>& cells, const TailFit& fit,
                   bool pass, double rel) {
  for (const auto& cell : cells) {
    const auto& e = cell.estimate;
    cells_table.add({number(cell.hurst), to_string(fit.side), number(cell.x0), number(cell.horizon),
                     std::to_string(cell.cells), std::to_string(e.reps), std::to_string(e.hits), number(e.probability),
                     number(e.std_error), number(e.ci_low), number(e.ci_high), number(e.ess),
                     e.tilted ? "tilted" : "plain", e.tilted ? number(e.simulation_drift) : ""});
  }
  fit_table.add({number(fit.hurst), to_string(fit.side), number(fit.x0), number(fit.raw.slope),
                 number(fit.raw.slope_se), number(fit.corrected.slope), number(fit.corrected.slope_se),
                 number(fit.rate_printed), number(fit.rate_numeric_printed), number(fit.rate_numeric_chernoff),
                 number(rel), flag(fit.valid), flag(pass)});
}

nlohmann::ordered_json fit_json(const TailFit& fit, double rel, bool pass) {
  return {{"H", fit.hurst},
          {"side", to_string(fit.side)},
          {"x", fit.x0},
          {"slope", fit.raw.slope},
          {"slope_se", fit.raw.slope_se},
          {"slope_corrected", fit.corrected.slope},
          {"rate_printed_formula", number(fit.rate_printed)},
          {"rate_numeric_printed_convention", number(fit.rate_numeric_printed)},
          {"rate_numeric_chernoff_convention", number(fit.rate_numeric_chernoff)},
          {"rel_error_chernoff", rel},
          {"pass", pass}};
}

}  // namespace

ExperimentReport run_tail_slopes(const ExperimentConfig& c, const RunContext& ctx) {
  validate(c);
  ExperimentReport report;
  report.experiment = "tail_slopes";
  Table cells_table{"tail_cells", kTailCellColumns, {}};
  Table fit_table{"tail_slopes", kTailFitColumns, {}};
  report.summary["fits"] = nlohmann::ordered_json::array();
  for (double h : c.hurst) {
    for (double x0 : c.tail_x) {
      const auto [cells, fit] = tail_study(c, h, x0, ctx);
      const double target = fit.rate_numeric_chernoff;
      const double rel = std::abs(-fit.raw.slope - target) / std::abs(target);
      const bool pass = fit.valid && rel <= c.gate_slope_rel;
      add_tail_rows(cells_table, fit_table, cells, fit, pass, rel);
      report.gates.push_back({"tail slope H=" + brief(h) + " x=" + brief(x0), pass,
                              "-slope " + brief(-fit.raw.slope) + " vs numeric rate " + brief(target) +
                                  " (relative error " + brief(rel) + ", gate " + brief(c.gate_slope_rel) +
                                  "); printed formula gives " + brief(fit.rate_printed)});
      report.summary["fits"].push_back(fit_json(fit, rel, pass));
    }
  }
  report.tables = {fit_table, cells_table};
  return report;
}

ExperimentReport run_h_invariance(const ExperimentConfig& c, const RunContext& ctx) {
  validate(c);
  if (c.tail_x.empty()) throw Error(Errc::config_error, "h_invariance needs a tail threshold (key 'tail_x')");
  ExperimentReport report;
  report.experiment = "h_invariance";
  Table cells_table{"tail_cells", kTailCellColumns, {}};
  Table fit_table{"tail_slopes", kTailFitColumns, {}};
  Table pairs{"h_invariance", {"H_i", "H_j", "slope_i", "slope_j", "diff", "pooled_se", "z", "pass"}, {}};
  const double x0 = c.tail_x.front();
  std::vector<TailFit> fits;
  report.summary["fits"] = nlohmann::ordered_json::array();
  for (double h : c.hurst) {
    const auto [cells, fit] = tail_study(c, h, x0, ctx);
    const double rel = std::abs(-fit.raw.slope - fit.rate_numeric_chernoff) / std::abs(fit.rate_numeric_chernoff);
    add_tail_rows(cells_table, fit_table, cells, fit, fit.valid && rel <= c.gate_slope_rel, rel);
    report.summary["fits"].push_back(fit_json(fit, rel, fit.valid && rel <= c.gate_slope_rel));
    fits.push_back(fit);
  }
  report.summary["comparisons"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < fits.size(); ++i) {
    for (std::size_t j = i + 1; j < fits.size(); ++j) {
      const double diff = fits[i].raw.slope - fits[j].raw.slope;
      const double pooled = std::hypot(fits[i].raw.slope_se, fits[j].raw.slope_se);
      const bool pass = fits[i].valid && fits[j].valid && std::abs(diff) <= c.gate_pooled_se * pooled;
      pairs.add({number(fits[i].hurst), number(fits[j].hurst), number(fits[i].raw.slope), number(fits[j].raw.slope),
                 number(diff), number(pooled), number(diff / pooled), flag(pass)});
      report.gates.push_back({"slope H=" + brief(fits[i].hurst) + " vs H=" + brief(fits[j].hurst), pass,
                              "|diff| " + brief(std::abs(diff)) + ", pooled se " + brief(pooled) + " (gate " +
                                  brief(c.gate_pooled_se) + " se)"});
      report.summary["comparisons"].push_back(
          {{"H_i", fits[i].hurst}, {"H_j", fits[j].hurst}, {"diff", diff}, {"pooled_se", pooled}, {"pass", pass}});
    }
  }
  report.tables = {pairs, fit_table, cells_table};
  return report;
}

ExperimentReport run_cgf_convergence(const ExperimentConfig& c, const RunContext& ctx) {
  validate(c);
  ExperimentReport report;
  report.experiment = "cgf_convergence";
  Table table{"cgf_convergence",
              {"H", "mu", "T", "n", "riccati", "liouville", "mc", "mc_se", "limit", "distance", "blowup_time"},
              {}};
  std::vector<double> horizons = c.horizons;
  std::sort(horizons.begin(), horizons.end());
  const double t_max = horizons.back();
  const std::size_t n_max = c.cells != 0 ? c.cells : c.cells_for(t_max);
  report.summary["cells"] = nlohmann::ordered_json::array();

  for (double h : c.hurst) {
    const TimeGrid grid(t_max, n_max);
    const QVTable qv = quadratic_variation(h, grid);
    // One Monte Carlo batch per horizon, shared by all μ.
    std::vector<std::vector<EstimateRecord>> mc(horizons.size());
    if (c.mc_reps > 0) {
      for (std::size_t k = 0; k < horizons.size(); ++k) {
        const auto pipe = pipeline_for(c, h, horizons[k], ctx);
        mc[k] = ldp::simulate_estimates(pipe, cell_seed(c.seed, {tag("cgf"), bits(h), bits(horizons[k])}), c.mc_reps,
                                        c.thread_budget())
                    .records;
      }
    }
    for (double mu : c.mu) {
      const auto limit = ldp::k_limit(mu, c.theta);
      const auto ric = ldp::solve_riccati(c.theta, mu, qv, t_max);
      std::optional<ldp::LinearizedRun> lin;
      try {
        lin = ldp::solve_linearized(c.theta, mu, qv, t_max);
      } catch (const Error& e) {
        if (!e.is_numerical()) throw;
      }
      std::vector<double> distances;
      for (std::size_t k = 0; k < horizons.size(); ++k) {
        const double T = horizons[k];
        const std::size_t node = grid.index_of(T);
        double kr = std::numeric_limits<double>::quiet_NaN(), kl = kr, km = kr, km_se = kr;
        if (mu == 0.0 || node <= ric.last_node) kr = ldp::k_T_via_riccati(ric, node);
        if (lin) {
          try {
            kl = ldp::k_T_via_liouville(*lin, node);
          } catch (const Error& e) {
            if (!e.is_numerical()) throw;
          }
        }
        if (!mc[k].empty()) {
          const auto est = ldp::empirical_cgf(mc[k], 0.0, -mu, T, cell_seed(c.seed, {tag("bootstrap"), bits(mu)}),
                                              c.bootstrap);
          km = est.value;
          km_se = est.std_error;
        }
        const double dist = limit ? std::abs(kr - *limit) : std::numeric_limits<double>::quiet_NaN();
        distances.push_back(dist);
        table.add({number(h), number(mu), number(T), std::to_string(node), number(kr), number(kl), number(km),
                   number(km_se), limit ? number(*limit) : "nan", number(dist),
                   ric.blew_up ? number(ric.blowup_time) : ""});
        report.summary["cells"].push_back({{"H", h}, {"mu", mu}, {"T", T}, {"riccati", number(kr)},
                                           {"liouville", number(kl)}, {"mc", number(km)}, {"distance", number(dist)}});
      }
      bool decreasing = true;
      for (std::size_t k = 1; k < distances.size(); ++k) {
        const bool both_zero = distances[k] <= 1e-15 && distances[k - 1] <= 1e-15;
        if (!(distances[k] < distances[k - 1] || both_zero)) decreasing = false;
      }
      const bool close = distances.back() <= c.gate_limit;
      report.gates.push_back({"K_T limit H=" + brief(h) + " mu=" + brief(mu), decreasing && close,
                              "distance at T=" + brief(t_max) + " is " + brief(distances.back()) +
                                  (decreasing ? ", decreasing in T" : ", not decreasing in T")});
      progress(ctx, "cgf H=" + brief(h) + " mu=" + brief(mu) + " distance=" + brief(distances.back()));
    }
  }
  report.tables = {table};
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& c, const RunContext& ctx) {
  const bool tails = c.experiment == "tail_slopes" || c.experiment == "h_invariance";
  std::vector<std::string> warnings = c.experiment == "cgf_convergence" ? std::vector<std::string>{} : hurst_warnings(c);
  if (tails && !c.tilt_value()) {
    for (auto& w : tail_hit_warnings(c)) warnings.push_back(c.tilt == "auto" ? w + "; the cell is re-run tilted if short" : w);
  }
  for (const auto& w : warnings) progress(ctx, "warning: " + w);

  ExperimentReport report;
  if (c.experiment == "normality") report = run_normality(c, ctx);
  else if (c.experiment == "tail_slopes") report = run_tail_slopes(c, ctx);
  else if (c.experiment == "cgf_convergence") report = run_cgf_convergence(c, ctx);
  else if (c.experiment == "h_invariance") report = run_h_invariance(c, ctx);
  else throw Error(Errc::config_error, "unknown experiment '" + c.experiment + "'");
  if (!warnings.empty()) report.summary["warnings"] = warnings;
  return report;
}

}  // namespace mfou::experiment
