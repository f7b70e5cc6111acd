#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mfou::experiment {

enum class TailSide { upper, lower };
const char* to_string(TailSide s) noexcept;

/// One documented configuration key.
struct KeySpec {
  const char* name;
  const char* default_value;
  const char* constraint;
  const char* description;
};

/// Every key the configuration accepts, in documentation order.
const std::vector<KeySpec>& config_keys();

/// Section names accepted in a config file besides the leading common block.
const std::vector<std::string>& config_sections();

struct ExperimentConfig {
  double theta = 1.0;
  std::vector<double> hurst{0.7};
  std::vector<double> horizons{5.0};
  std::size_t cells = 0;            // absolute; 0 means derive from cells_per_unit
  double cells_per_unit = 50.0;
  std::size_t reps = 1000;
  std::uint64_t seed = 20240101;
  std::vector<double> mu{0.25, 0.5, 1.0};
  std::vector<double> a{};
  std::vector<double> b{};
  std::vector<double> x{-1.0, 0.0, 1.0, 2.0};
  std::vector<double> tail_x{1.5};
  TailSide tail_side = TailSide::upper;
  std::string tilt = "auto";        // auto | none | a number φ
  std::size_t min_hits = 20;
  std::size_t mc_reps = 0;          // Monte Carlo route in cgf_convergence
  std::size_t bootstrap = 200;
  unsigned threads = 0;             // 0: MFOU_THREADS or logical cores
  std::string experiment = "normality";
  double gate_var_low = 1.6;
  double gate_var_high = 2.4;
  double gate_ks = 0.05;
  double gate_slope_rel = 0.2;
  double gate_pooled_se = 2.0;
  double gate_limit = 0.05;
  double max_attrition = 0.001;

  /// Cells for horizon T.
  std::size_t cells_for(double horizon) const;
  /// Effective thread count.
  unsigned thread_budget() const;
  /// φ when `tilt` is numeric.
  std::optional<double> tilt_value() const;

  /// Canonical `key = value` text; parse(to_text()) reproduces the config.
  std::string to_text() const;
  /// FNV-1a of to_text(), 16 hex digits.
  std::string hash() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses config text. Lines before the first `[section]` are common; a
/// section named after `subcommand` overrides them; other known sections are
/// checked and skipped. `#` starts a comment. Throws ConfigError naming the
/// offending key or line (unknown key, duplicate key, bad value).
ExperimentConfig parse_config(std::istream& in, const std::string& subcommand = "",
                              const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path, const std::string& subcommand = "");

/// Applies `key=value` overrides in order (later wins).
void apply_overrides(ExperimentConfig& config, const std::vector<std::string>& overrides);

/// Sets one key from its text form. Throws ConfigError.
void set_key(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Cross-field validation (H ∈ (0,1], θ > 0, μ > −θ²/2, ...). Throws ConfigError.
void validate(const ExperimentConfig& config);

/// Notes for H outside [1/2, 1): the kernel solver is unvalidated below 1/2
/// and H = 1 is simulated as B^1_t = tξ.
std::vector<std::string> hurst_warnings(const ExperimentConfig& config);

/// Tail cells whose expected plain hit count, with θ̂ ≈ N(θ, 2θ/T), is below
/// min_hits.
std::vector<std::string> tail_hit_warnings(const ExperimentConfig& config);

}  // namespace mfou::experiment
