#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "mfou");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = mfou::cli::parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mfou_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help lists every key") {
    const auto r = run({"--help"});
    CHECK(r.code == 0);
    for (const char* key : {"theta", "H", "cells_per_unit", "max_attrition", "gate_ks", "tilt", "MFOU_THREADS"})
      CHECK(r.out.find(key) != std::string::npos);
    CHECK(r.out.find("(0, 1]") != std::string::npos);
  }

  TEST_CASE("usage errors") {
    CHECK(run({}).code == 1);
    CHECK(run({"bogus"}).code == 1);
    CHECK(run({"rate", "--nope"}).code == 1);
    CHECK(run({"cgf", "--method", "magic"}).code == 1);
  }

  TEST_CASE("config errors") {
    const auto r = run({"simulate", "--set", "H=1.5", "-o", scratch("h15").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("(0, 1]") != std::string::npos);
    CHECK(run({"rate", "--set", "nokey=1"}).code == 2);
    CHECK(run({"rate", "-c", "/nonexistent/mfou.cfg"}).code == 2);
    CHECK(run({"rate", "--theta", "-1", "--x", "1"}).code == 2);
  }

  TEST_CASE("rate prints both conventions") {
    const auto r = run({"rate", "--theta", "1", "--x", "-1"});
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    std::istringstream cells(row);
    std::string x, printed, numeric_printed;
    cells >> x >> printed >> numeric_printed;
    CHECK(x == "-1");
    CHECK(printed == "0");
    CHECK(std::abs(std::stod(numeric_printed)) < 1e-12);
    CHECK(row.find("inf") != std::string::npos);
  }

  TEST_CASE("simulate writes paths") {
    const auto dir = scratch("sim");
    const auto r = run({"simulate", "--set", "H=0.7", "--set", "T=1", "--set", "cells=16", "-o", dir.string()});
    CHECK(r.code == 0);
    std::ifstream in(dir / "paths.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,B,B^H,Btilde,X");
  }

  TEST_CASE("config file with sections") {
    const auto dir = scratch("cfg");
    fs::create_directories(dir);
    {
      std::ofstream f(dir / "run.cfg");
      f << "H = 0.7\nT = 1\ncells = 16\nreps = 3\n[estimate]\nreps = 5\n";
    }
    const auto r = run({"estimate", "-c", (dir / "run.cfg").string(), "-o", dir.string(), "--no-cache"});
    CHECK(r.code == 0);
    std::ifstream in(dir / "estimates.csv");
    std::string line;
    int rows = -1;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 5);
  }

  TEST_CASE("cgf analytic") {
    const auto r = run({"cgf", "--set", "mu=0,1.5", "--set", "theta=1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("-0.5") != std::string::npos);
  }

  TEST_CASE("experiment check mode maps failed gates to 4") {
    const auto dir = scratch("exp");
    const auto r = run({"experiment", "--name", "cgf_convergence", "--check", "-o", dir.string(), "--no-cache",
                        "--set", "T=2,4", "--set", "mu=0.5", "--set", "cells_per_unit=20", "--set", "gate_limit=1e-9"});
    CHECK(r.code == 4);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "cgf_convergence.csv"));
  }
}
