#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "mfou/csv.hpp"
#include "mfou/error.hpp"
#include "mfou/experiment/config.hpp"
#include "mfou/experiment/harness.hpp"
#include "mfou/experiment/report.hpp"
#include "mfou/inference.hpp"
#include "mfou/ldp/analytic.hpp"
#include "mfou/ldp/monte_carlo.hpp"
#include "mfou/ldp/riccati.hpp"
#include "mfou/numerics/parallel.hpp"
#include "mfou/numerics/random.hpp"
#include "mfou/paths.hpp"
#include "mfou/transform.hpp"

namespace mfou::cli {
namespace {

namespace fs = std::filesystem;
using csv::number;
using experiment::ExperimentConfig;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::string cache_dir;
  bool no_cache = false;
  unsigned threads = 0;
  bool verbose = false;
};

std::string key_table() {
  std::ostringstream s;
  s << "Config keys (file: `key = value`, optional [simulate] [kernel] [estimate] [cgf] [rate] [experiment]\n"
       "sections override the leading block for that subcommand; --set key=value overrides both):\n";
  for (const auto& k : experiment::config_keys()) {
    s << "  " << std::left << std::setw(16) << k.name << " default: " << std::setw(14)
      << (std::string(k.default_value).empty() ? "(empty)" : k.default_value) << " constraint: " << k.constraint
      << "\n      " << k.description << "\n";
  }
  s << "Thread budget: " << kThreadsEnv << " environment variable (default: logical cores), overridden by --threads.\n"
    << "Exit codes: 0 ok, 1 usage, 2 config, 3 numerical failure, 4 acceptance gate failed (experiment --check).\n";
  return s.str();
}

void add_common(CLI::App* app, Common& c, bool default_out) {
  app->add_option("-c,--config", c.config_path, "config file");
  app->add_option("-s,--set", c.overrides, "override key=value (repeatable)")->allow_extra_args(false);
  if (default_out) {
    app->add_option("-o,--out", c.out_dir, "output directory (default: mfou-out)");
  } else {
    app->add_option("-o,--out", c.out_dir, "output directory (no files written when omitted)");
  }
  app->add_option("--cache-dir", c.cache_dir, "kernel cache directory (default: <out>/kernel-cache)");
  app->add_flag("--no-cache", c.no_cache, "do not read or write the disk kernel cache");
  app->add_option("-j,--threads", c.threads, "worker threads (overrides MFOU_THREADS and the config)");
  app->add_flag("-v,--verbose", c.verbose, "progress on standard error");
  app->footer(key_table());
}

ExperimentConfig load(const Common& c, const std::string& subcommand) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : experiment::load_config(c.config_path, subcommand);
  experiment::apply_overrides(cfg, c.overrides);
  if (c.threads) cfg.threads = c.threads;
  experiment::validate(cfg);
  return cfg;
}

std::unique_ptr<experiment::KernelCache> make_cache(const Common& c) {
  if (c.no_cache) return std::make_unique<experiment::KernelCache>();
  fs::path dir = !c.cache_dir.empty() ? fs::path(c.cache_dir)
                 : !c.out_dir.empty() ? fs::path(c.out_dir) / "kernel-cache"
                                      : fs::path();
  if (dir.empty()) return std::make_unique<experiment::KernelCache>();
  return std::make_unique<experiment::KernelCache>(dir);
}

std::ofstream open_file(const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  return out;
}

void warn(const ExperimentConfig& cfg, std::ostream& err) {
  for (const auto& w : experiment::hurst_warnings(cfg)) err << "warning: " << w << "\n";
}

ProcessSpec first_spec(const ExperimentConfig& cfg) {
  const double T = cfg.horizons.front();
  return {cfg.hurst.front(), cfg.theta, TimeGrid(T, cfg.cells_for(T))};
}

int cmd_simulate(const Common& c, std::uint64_t rep, std::ostream& out, std::ostream& err) {
  const auto cfg = load(c, "simulate");
  warn(cfg, err);
  const auto spec = first_spec(cfg);
  RandomStream rng(cfg.seed, rep);
  const auto path = sample_mixed_path(spec, rng);
  const fs::path file = fs::path(c.out_dir) / "paths.csv";
  auto f = open_file(file);
  write_paths_csv(f, path);
  out << "wrote " << file.string() << " (H=" << csv::brief(spec.hurst) << ", T=" << csv::brief(spec.grid.horizon())
      << ", n=" << spec.grid.cells() << ", rep=" << rep << ")\n";
  return kOk;
}

int cmd_kernel(const Common& c, bool dump, std::ostream& out, std::ostream& err) {
  const auto cfg = load(c, "kernel");
  warn(cfg, err);
  auto cache = make_cache(c);
  const auto spec = first_spec(cfg);
  const auto kernel = cache->get(spec);
  const QVTable qv = quadratic_variation(*kernel);
  const fs::path dir(c.out_dir);
  {
    auto f = open_file(dir / "bracket.csv");
    write_bracket_csv(f, qv);
  }
  if (dump) {
    auto f = open_file(dir / "kernel.csv");
    write_kernel_csv(f, *kernel);
  }
  out << "H=" << csv::brief(spec.hurst) << " T=" << csv::brief(spec.grid.horizon()) << " n=" << spec.grid.cells()
      << " <M>_T=" << csv::brief(qv.bracket.back()) << " max_residual=" << csv::brief(kernel->max_residual())
      << " checked_columns=" << kernel->checked_columns() << (cache->disk_hits() ? " (cached)" : "") << "\n";
  return kOk;
}

int cmd_estimate(const Common& c, std::ostream& out, std::ostream& err) {
  const auto cfg = load(c, "estimate");
  warn(cfg, err);
  auto cache = make_cache(c);
  const auto spec = first_spec(cfg);
  const EstimationPipeline pipe(spec, *cache->get(spec));
  const auto batch = ldp::simulate_estimates(pipe, cfg.seed, cfg.reps, cfg.thread_budget());
  const fs::path file = fs::path(c.out_dir) / "estimates.csv";
  auto f = open_file(file);
  write_estimates_header(f);
  double mean = 0.0;
  for (const auto& r : batch.records) {
    write_estimate_row(f, r, cfg.theta, spec.grid.cells());
    mean += r.theta_hat;
  }
  mean /= static_cast<double>(std::max<std::size_t>(1, batch.records.size()));
  if (batch.degenerate) err << batch.degenerate << " degenerate replications dropped\n";
  out << "wrote " << file.string() << ": " << batch.records.size() << " estimates, mean theta_hat " << csv::brief(mean)
      << "\n";
  return kOk;
}

const std::vector<std::string> kCgfColumns{"x", "mu", "a", "b", "convention", "value", "method", "stderr"};

int write_cgf_rows(const Common& c, const std::string& file, const std::vector<std::vector<std::string>>& rows,
                   std::ostream& out) {
  csv::write_row(out, kCgfColumns);
  for (const auto& r : rows) csv::write_row(out, r);
  if (!c.out_dir.empty()) {
    auto f = open_file(fs::path(c.out_dir) / file);
    csv::write_row(f, kCgfColumns);
    for (const auto& r : rows) csv::write_row(f, r);
  }
  return kOk;
}

std::string maybe(const std::optional<double>& v) { return v ? number(*v) : "nan"; }

int cmd_cgf(const Common& c, const std::string& method, std::ostream& out, std::ostream& err) {
  const auto cfg = load(c, "cgf");
  if (method != "analytic") warn(cfg, err);
  std::vector<std::vector<std::string>> rows;
  const double T = cfg.horizons.front();
  if (method == "analytic") {
    for (double mu : cfg.mu) rows.push_back({"", number(mu), "", "", "", maybe(ldp::k_limit(mu, cfg.theta)), method, ""});
    for (std::size_t i = 0; i < cfg.a.size(); ++i) {
      rows.push_back({"", "", number(cfg.a[i]), number(cfg.b[i]), "", maybe(ldp::cgf_limit(cfg.a[i], cfg.b[i], cfg.theta)),
                      method, ""});
    }
  } else if (method == "riccati" || method == "liouville") {
    if (!cfg.a.empty()) err << "keys a/b are ignored by --method " << method << "\n";
    const QVTable qv = quadratic_variation(cfg.hurst.front(), TimeGrid(T, cfg.cells_for(T)));
    for (double mu : cfg.mu) {
      const double k = method == "riccati" ? ldp::k_T_via_riccati(ldp::solve_riccati(cfg.theta, mu, qv, T))
                                           : ldp::k_T_via_liouville(cfg.theta, mu, qv, T);
      rows.push_back({"", number(mu), "", "", "", number(k), method, ""});
    }
  } else {
    auto cache = make_cache(c);
    const auto spec = first_spec(cfg);
    const EstimationPipeline pipe(spec, *cache->get(spec));
    const auto batch = ldp::simulate_estimates(pipe, cfg.seed, cfg.reps, cfg.thread_budget());
    auto emit = [&](double a, double b, std::string mu_cell, std::string a_cell, std::string b_cell) {
      const auto est = ldp::empirical_cgf(batch.records, a, b, T, cfg.seed ^ 0xb007ULL, cfg.bootstrap);
      if (est.heavy_tail || est.unreliable) err << "warning: unstable exponential moment at a=" << csv::brief(a) << " b=" << csv::brief(b) << "\n";
      rows.push_back({"", std::move(mu_cell), std::move(a_cell), std::move(b_cell), "", number(est.value), method,
                      number(est.std_error)});
    };
    for (double mu : cfg.mu) emit(0.0, -mu, number(mu), "", "");
    for (std::size_t i = 0; i < cfg.a.size(); ++i) emit(cfg.a[i], cfg.b[i], "", number(cfg.a[i]), number(cfg.b[i]));
  }
  return write_cgf_rows(c, "cgf.csv", rows, out);
}

int cmd_rate(const Common& c, std::optional<double> theta, std::vector<double> xs, std::ostream& out) {
  auto cfg = load(c, "rate");
  if (theta) {
    if (!(*theta > 0.0)) throw Error(Errc::config_error, "theta must be > 0");
    cfg.theta = *theta;
  }
  if (xs.empty()) xs = cfg.x;
  std::vector<std::vector<std::string>> rows;
  out << std::left << std::setw(12) << "x" << std::setw(24) << "printed_formula" << std::setw(24)
      << "numeric(b=-xa)" << "numeric(b=+xa)\n";
  for (double x : xs) {
    const double printed = ldp::rate_function_printed(x, cfg.theta);
    const auto np = ldp::rate_function_numeric({x, cfg.theta, ldp::SignConvention::printed});
    const auto nc = ldp::rate_function_numeric({x, cfg.theta, ldp::SignConvention::chernoff});
    auto show = [](const ldp::RateResult& r) { return r.unbounded_below ? std::string("inf (unbounded)") : number(r.value); };
    out << std::setw(12) << number(x) << std::setw(24) << number(printed) << std::setw(24) << show(np) << show(nc)
        << "\n";
    rows.push_back({number(x), "", "", "", "printed", number(printed), "printed_formula", ""});
    rows.push_back({number(x), "", number(np.argmin), number(-x * np.argmin), "printed", number(np.value), "numeric", ""});
    rows.push_back({number(x), "", number(nc.argmin), number(x * nc.argmin), "chernoff", number(nc.value), "numeric", ""});
  }
  if (!c.out_dir.empty()) {
    auto f = open_file(fs::path(c.out_dir) / "rate.csv");
    csv::write_row(f, kCgfColumns);
    for (const auto& r : rows) csv::write_row(f, r);
  }
  return kOk;
}

int cmd_experiment(const Common& c, const std::string& name, bool check, std::ostream& out, std::ostream& err) {
  auto cfg = load(c, "experiment");
  if (!name.empty()) experiment::set_key(cfg, "experiment", name);
  auto cache = make_cache(c);
  experiment::RunContext ctx{cache.get(), c.verbose ? &err : nullptr};
  const auto start = std::chrono::steady_clock::now();
  const auto report = experiment::run_experiment(cfg, ctx);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  experiment::write_outputs(report, cfg, c.out_dir, wall);
  if (report.summary.contains("warnings") && !c.verbose) {
    for (const auto& w : report.summary["warnings"]) err << "warning: " << w.get<std::string>() << "\n";
  }
  for (const auto& g : report.gates) out << (g.pass ? "PASS " : "FAIL ") << g.name << ": " << g.detail << "\n";
  out << "wrote " << report.tables.size() << " tables and manifest.json to " << c.out_dir << "\n";
  if (check && !report.passed()) return kGateFailed;
  return kOk;
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixed fractional Ornstein-Uhlenbeck laboratory"};
  app.require_subcommand(1);
  app.footer(key_table());
  Common common;

  auto* simulate = app.add_subcommand("simulate", "sample one path and write paths.csv");
  std::uint64_t rep = 0;
  simulate->add_option("--rep", rep, "replication index");
  add_common(simulate, common, true);

  auto* kernel = app.add_subcommand("kernel", "build the transfer kernel, write bracket.csv");
  bool dump = false;
  kernel->add_flag("--dump-kernel", dump, "also write kernel.csv (s,t,g)");
  add_common(kernel, common, true);

  auto* estimate = app.add_subcommand("estimate", "run replications and write estimates.csv");
  add_common(estimate, common, true);

  auto* cgf = app.add_subcommand("cgf", "normalized cumulant generating functions");
  std::string method = "analytic";
  cgf->add_option("--method", method, "analytic | riccati | liouville | mc")
      ->check(CLI::IsMember({"analytic", "riccati", "liouville", "mc"}));
  add_common(cgf, common, false);

  auto* rate = app.add_subcommand("rate", "rate function, printed formula and numeric infimum side by side");
  std::optional<double> theta;
  std::vector<double> xs;
  rate->add_option("--theta", theta, "drift parameter (overrides the config)");
  rate->add_option("--x", xs, "arguments (overrides key x)")->allow_extra_args(false);
  add_common(rate, common, false);

  auto* exp = app.add_subcommand("experiment", "run a replication study, write CSVs and manifest.json");
  std::string name;
  bool check = false;
  exp->add_option("--name", name, "normality | tail_slopes | cgf_convergence | h_invariance");
  exp->add_flag("--check", check, "exit 4 when an acceptance gate fails");
  add_common(exp, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  const bool writes_files = *simulate || *kernel || *estimate || *exp;
  if (writes_files && common.out_dir.empty()) common.out_dir = "mfou-out";

  try {
    if (*simulate) return cmd_simulate(common, rep, out, err);
    if (*kernel) return cmd_kernel(common, dump, out, err);
    if (*estimate) return cmd_estimate(common, out, err);
    if (*cgf) return cmd_cgf(common, method, out, err);
    if (*rate) return cmd_rate(common, theta, xs, out);
    if (*exp) return cmd_experiment(common, name, check, out, err);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.is_numerical() ? kNumerical : kConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

}  // namespace mfou::cli
