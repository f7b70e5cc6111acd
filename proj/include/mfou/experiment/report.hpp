#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "mfou/experiment/config.hpp"

namespace mfou::experiment {

inline constexpr const char* kCodeVersion = "mfou 0.1.0";

/// A CSV table with a fixed column order; cells are already formatted.
struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
};

struct Gate {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<Table> tables;
  std::vector<Gate> gates;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();

  bool passed() const;
};

/// Writes one CSV per table plus manifest.json (config echo, seed, hash,
/// code version, summary, gates, wall clock). Throws IoError with the path.
void write_outputs(const ExperimentReport& report, const ExperimentConfig& config, const std::filesystem::path& dir,
                   double wall_clock_seconds);

/// Writes a single table as `<dir>/<name>.csv`.
void write_table(const Table& table, const std::filesystem::path& dir);

}  // namespace mfou::experiment
