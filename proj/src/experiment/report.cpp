#include "mfou/experiment/report.hpp"

#include <fstream>

#include "mfou/csv.hpp"
#include "mfou/error.hpp"
#include "mfou/transform.hpp"

namespace mfou::experiment {

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) {
    throw Error(Errc::length_mismatch, "table " + name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                                           std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

bool ExperimentReport::passed() const {
  for (const auto& g : gates)
    if (!g.pass) return false;
  return true;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

void write_table(const Table& table, const std::filesystem::path& dir) {
  ensure_dir(dir);
  const auto path = dir / (table.name + ".csv");
  auto out = open_output(path);
  csv::write_row(out, table.columns);
  for (const auto& row : table.rows) csv::write_row(out, row);
  if (!out) throw Error(Errc::io_error, "failed writing " + path.string());
}

void write_outputs(const ExperimentReport& report, const ExperimentConfig& config, const std::filesystem::path& dir,
                   double wall_clock_seconds) {
  ensure_dir(dir);
  for (const auto& t : report.tables) write_table(t, dir);

  nlohmann::ordered_json m;
  m["experiment"] = report.experiment;
  m["code_version"] = kCodeVersion;
  m["kernel_scheme_version"] = kKernelSchemeVersion;
  m["config_hash"] = config.hash();
  m["seed"] = config.seed;
  m["config"] = config.to_text();
  m["files"] = nlohmann::ordered_json::array();
  for (const auto& t : report.tables) m["files"].push_back(t.name + ".csv");
  m["summary"] = report.summary;
  m["gates"] = nlohmann::ordered_json::array();
  for (const auto& g : report.gates) {
    m["gates"].push_back({{"name", g.name}, {"pass", g.pass}, {"detail", g.detail}});
  }
  m["passed"] = report.passed();
  m["wall_clock_seconds"] = wall_clock_seconds;

  const auto path = dir / "manifest.json";
  auto out = open_output(path);
  out << m.dump(2) << '\n';
  if (!out) throw Error(Errc::io_error, "failed writing " + path.string());
}

}  // namespace mfou::experiment
