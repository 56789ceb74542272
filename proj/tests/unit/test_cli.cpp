#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "qwalk/cli/config.hpp"
#include "qwalk/cli/output.hpp"
#include "qwalk/cli/runner.hpp"
#include "qwalk/errors.hpp"

using namespace qwalk;
using namespace qwalk::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qwalk_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string field_of(const json& j) {
  try {
    validate(config_from_json(j));
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

WalkConfig line_config(WalkKind kind, int steps, const fs::path& out) {
  WalkConfig c;
  c.walk_kind = kind;
  c.steps = steps;
  c.output = out.string();
  return c;
}

}  // namespace

TEST_CASE("config errors name the offending field") {
  CHECK(field_of({{"colour", 1}}) == "colour");
  CHECK(field_of({{"graph", {{"size", "big"}}}}) == "graph.size");
  CHECK(field_of({{"graph", {{"kind", "torus"}}}}) == "graph.kind");
  CHECK(field_of({{"decoherence", {{"p", 1.5}}}}) == "decoherence.p");
  CHECK(field_of({{"steps", 1.5}}) == "steps");
  CHECK(field_of({{"graph", {{"kind", "line"}, {"size", 10}}}}) == "graph.size");
  CHECK(field_of({{"graph", {{"kind", "cycle"}, {"size", 2}}}}) == "graph.size");
  CHECK(field_of({{"threads", 0}}) == "threads");
  CHECK(field_of({{"initial", json::array({json::array({1.0, 0.0})})}}) == "initial");
  CHECK(field_of({{"walk_kind", "continuous"}, {"decoherence", {{"p", 0.1}}}}) == "decoherence.p");
  CHECK(field_of({{"graph", {{"kind", "hypercube"}, {"size", 12}}}, {"decoherence", {{"p", 0.1}}}}) ==
        "decoherence.mode");
  CHECK(field_of({{"graph", {{"kind", "hypercube"}, {"size", 3}}}, {"initial", "symmetric"}}) == "initial");
  CHECK(field_of({{"initial", "sideways"}}) == "initial");
  CHECK(field_of({{"graph", {{"kind", "hypercube"}, {"size", 3}}}, {"initial", "uniform"}}).empty());
  CHECK(field_of(json::object()).empty());
}

TEST_CASE("config survives a json round trip") {
  WalkConfig c;
  c.walk_kind = WalkKind::continuous;
  c.graph.kind = GraphKind::glued_trees;
  c.graph.depth = 5;
  c.time = 7.5;
  c.seed = 99;
  c.amplitudes = {{0.6, 0.0}, {0.0, 0.8}};
  const WalkConfig back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("default thread count comes from the environment") {
  ::setenv(kThreadsEnv, "3", 1);
  CHECK(default_threads() == 3);
  ::setenv(kThreadsEnv, "zero", 1);
  CHECK(default_threads() == 1);
  ::unsetenv(kThreadsEnv);
  CHECK(default_threads() == 1);
}

TEST_CASE("coined line walk output is normalized with the right parity") {
  const fs::path dir = scratch("parity");
  for (int steps : {99, 100}) {
    const WalkConfig c = line_config(WalkKind::coined, steps, dir / ("walk" + std::to_string(steps) + ".csv"));
    REQUIRE(run_walk(c, std::cerr) == kExitOk);
    const CsvDistribution d = parse_distribution_csv(read_file(c.output));
    CHECK(d.label_column == "x");
    double total = 0.0;
    for (const auto& row : d.rows) {
      total += row.probability;
      CHECK(std::abs(row.label) % 2 == steps % 2);
      CHECK(std::abs(row.label) <= steps);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("re-runs are byte-identical") {
  const fs::path dir = scratch("determinism");
  WalkConfig c = line_config(WalkKind::coined, 60, dir / "a.csv");
  c.decoherence = {0.05, MeasurementTarget::both};
  c.mode = DecoherenceMode::trajectory;
  c.trajectories = 2000;
  c.threads = 3;
  WalkConfig d = c;
  d.output = (dir / "b.csv").string();
  d.threads = 1;
  REQUIRE(run_walk(c, std::cerr) == kExitOk);
  REQUIRE(run_walk(d, std::cerr) == kExitOk);
  CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
  CHECK(read_file(summary_path(dir / "a.csv")) == read_file(summary_path(dir / "b.csv")));
  CHECK(read_file(dir / "a.csv.record.csv") == read_file(dir / "b.csv.record.csv"));
}

TEST_CASE("classical line summary reports sqrt(t)") {
  const fs::path dir = scratch("classical");
  const WalkConfig c = line_config(WalkKind::classical, 100, dir / "c.csv");
  REQUIRE(run_walk(c, std::cerr) == kExitOk);
  const json s = json::parse(read_file(summary_path(c.output)));
  CHECK(s["std_dev"].get<double>() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(s["walk_kind"] == "classical");
}

TEST_CASE("metadata record reproduces the run") {
  const fs::path dir = scratch("meta");
  WalkConfig c = line_config(WalkKind::coined, 40, dir / "first.json");
  c.graph.kind = GraphKind::cycle;
  c.graph.size = 9;
  c.coin = CoinKind::grover;
  c.amplitudes = {{0.6, 0.0}, {0.0, 0.8}};
  c.decoherence = {0.2, MeasurementTarget::coin};
  c.format = OutputFormat::json;
  REQUIRE(run_walk(c, std::cerr) == kExitOk);
  const json meta = json::parse(read_file(meta_path(c.output)));
  CHECK(meta["version"] == kVersion);
  CHECK(meta["command"] == "walk");
  CHECK(meta["wall_time_seconds"].get<double>() >= 0.0);
  WalkConfig again = config_from_json(meta["config"]);
  again.output = (dir / "second.json").string();
  REQUIRE(run_walk(again, std::cerr) == kExitOk);
  json a = json::parse(read_file(dir / "first.json"));
  json b = json::parse(read_file(dir / "second.json"));
  CHECK(a == b);
  CHECK(a["metadata"]["walk_kind"] == "coined");
  CHECK(a["metadata"]["seed"] == 1);
  CHECK(a["columns"] == json::array({"x", "probability"}));
}

TEST_CASE("output files round-trip at printed precision") {
  const fs::path dir = scratch("roundtrip");
  WalkConfig c = line_config(WalkKind::coined, 30, dir / "d.csv");
  c.decoherence = {0.1, MeasurementTarget::position};
  const RunResult r = simulate(c);
  const CsvDistribution csv = parse_distribution_csv(distribution_csv(r.distribution));
  std::size_t k = 0;
  for (std::size_t i = 0; i < r.distribution.size(); ++i) {
    if (r.distribution[i] == 0.0) continue;
    REQUIRE(k < csv.rows.size());
    CHECK(csv.rows[k].label == r.distribution.coordinates()[i]);
    CHECK(csv.rows[k].probability == std::stod(format_number(r.distribution[i])));
    CHECK(format_number(csv.rows[k].probability) == format_number(r.distribution[i]));
    ++k;
  }
  CHECK(k == csv.rows.size());

  const json j = json::parse(distribution_json(r.distribution, json::object()).dump());
  REQUIRE(j["rows"].size() == csv.rows.size());
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    CHECK(j["rows"][i][0].get<int>() == csv.rows[i].label);
    CHECK(j["rows"][i][1].get<double>() == csv.rows[i].probability);
  }
}

TEST_CASE("graphs without coordinates use vertex labels") {
  WalkConfig c;
  c.walk_kind = WalkKind::continuous;
  c.graph.kind = GraphKind::hypercube;
  c.graph.size = 3;
  c.time = 1.0;
  const std::string text = distribution_csv(simulate(c).distribution);
  CHECK(text.rfind("vertex,probability\n", 0) == 0);
}

TEST_CASE("sweep over p") {
  const fs::path dir = scratch("sweep_p");
  WalkConfig c = line_config(WalkKind::coined, 100, dir / "run.csv");
  const std::vector<std::string> values{"0", "0.01", "0.03", "0.1", "1"};
  REQUIRE(run_sweep(c, "p", values, std::cerr) == kExitOk);
  for (const auto& v : values) CHECK(fs::exists(dir / ("run_p" + v + ".csv")));

  std::istringstream table(read_file(dir / "run_summary.csv"));
  std::string line;
  std::getline(table, line);
  CHECK(line.rfind("p,seed,std_dev,", 0) == 0);
  double previous = INFINITY;
  int rows = 0;
  unsigned long long seed = c.seed;
  while (std::getline(table, line)) {
    std::vector<std::string> cells;
    std::stringstream s(line);
    for (std::string cell; std::getline(s, cell, ',');) cells.push_back(cell);
    CHECK(cells[0] == values[rows]);
    CHECK(std::stoull(cells[1]) == seed++);
    const double sd = std::stod(cells[2]);
    CHECK(sd <= previous);
    previous = sd;
    ++rows;
  }
  CHECK(rows == 5);
}

TEST_CASE("sweep over glued-trees depth gives linear peak times") {
  const fs::path dir = scratch("sweep_depth");
  WalkConfig c;
  c.walk_kind = WalkKind::continuous;
  c.graph.kind = GraphKind::glued_trees;
  c.time = 12.0;
  c.dt = 0.001;
  c.output = (dir / "gt.csv").string();
  REQUIRE(run_sweep(c, "depth", {"2", "3", "4", "5", "6"}, std::cerr) == kExitOk);

  std::istringstream table(read_file(dir / "gt_summary.csv"));
  std::string line;
  std::getline(table, line);
  std::vector<double> depth, peak;
  while (std::getline(table, line)) {
    std::vector<std::string> cells;
    std::stringstream s(line);
    for (std::string cell; std::getline(s, cell, ',');) cells.push_back(cell);
    depth.push_back(std::stod(cells[0]));
    peak.push_back(std::stod(cells[6]));
  }
  REQUIRE(peak.size() == 5);
  const double slope = (peak.back() - peak.front()) / (depth.back() - depth.front());
  for (std::size_t k = 1; k < peak.size(); ++k) {
    CHECK(peak[k] - peak[k - 1] == doctest::Approx(slope).epsilon(0.2));
  }
  // Frozen regression data for the random-cycle join.
  CHECK(peak[0] == doctest::Approx(2.543));
  CHECK(peak[4] == doctest::Approx(5.593));
}

TEST_CASE("sweep rejects bad axes and empty value lists") {
  const fs::path dir = scratch("sweep_bad");
  WalkConfig c = line_config(WalkKind::coined, 10, dir / "x.csv");
  std::ostringstream log;
  CHECK(run_sweep(c, "p", {}, log) == kExitConfig);
  CHECK(run_sweep(c, "coin", {"1"}, log) == kExitConfig);
  CHECK(run_sweep(c, "steps", {"2.5"}, log) == kExitConfig);
  CHECK(run_sweep(c, "p", {"0.1", "abc"}, log) == kExitConfig);
  // All values are validated before anything is written.
  CHECK(run_sweep(c, "p", {"0.1", "2"}, log) == kExitConfig);
  CHECK_FALSE(fs::exists(dir / "x_p0.1.csv"));
  CHECK(log.str().find("values") != std::string::npos);
}

TEST_CASE("exit codes") {
  std::ostringstream log;
  CHECK(guarded(log, [] { return 0; }) == kExitOk);
  CHECK(guarded(log, []() -> int { throw ConfigError("steps", "bad"); }) == kExitConfig);
  CHECK(guarded(log, []() -> int { throw InvalidArgument("bad"); }) == kExitConfig);
  CHECK(guarded(log, []() -> int { throw UnsupportedDegree("bad"); }) == kExitConfig);
  CHECK(guarded(log, []() -> int { throw InvariantViolation("trace drifted"); }) == kExitInvariant);
  CHECK(guarded(log, []() -> int { throw BoundaryOverflow("edge"); }) == kExitInvariant);
  CHECK(guarded(log, []() -> int { throw std::runtime_error("disk"); }) == kExitFailure);
  CHECK(log.str().find("steps: bad") != std::string::npos);

  WalkConfig c;
  c.graph.kind = GraphKind::cycle;
  c.graph.size = 2;
  std::ostringstream walk_log;
  CHECK(run_walk(c, walk_log) == kExitConfig);
  CHECK(walk_log.str().find("graph.size") != std::string::npos);
}

TEST_CASE("trace prints the small-t amplitudes") {
  std::ostringstream out;
  REQUIRE(run_trace(3, WalkConfig{}, false, out, std::cerr) == kExitOk);
  const std::string text = out.str();
  CHECK(text.find("t=1 shift   (|-1,0> + |1,1>)/sqrt(2)\n") != std::string::npos);
  CHECK(text.find("t=2 shift   (|-2,0> + |0,0> + |0,1> - |2,1>)/2\n") != std::string::npos);
  CHECK(text.find("t=3 shift   (|-3,0> + 2|-1,0> + |-1,1> - |1,0> + |3,1>)/sqrt(8)\n") != std::string::npos);

  std::ostringstream csv;
  REQUIRE(run_trace(1, WalkConfig{}, true, csv, std::cerr) == kExitOk);
  CHECK(csv.str() ==
        "t,stage,x,coin,re,im\n"
        "0,initial,0,0,1,0\n"
        "1,coin,0,0,0.707106781186547,0\n"
        "1,coin,0,1,0.707106781186547,0\n"
        "1,shift,-1,0,0.707106781186547,0\n"
        "1,shift,1,1,0.707106781186547,0\n");
  std::ostringstream log;
  CHECK(run_trace(21, WalkConfig{}, false, out, log) == kExitConfig);
}

TEST_CASE("figure data") {
  const fs::path dir = scratch("figures");
  REQUIRE(run_figures("fig1", dir, 1, std::cerr) == kExitOk);
  std::istringstream summary(read_file(dir / "fig1_summary.csv"));
  std::string line;
  std::getline(summary, line);
  CHECK(line == "series,std_dev,central_std_dev");
  std::getline(summary, line);
  CHECK(line.rfind("quantum_zero,", 0) == 0);
  std::getline(summary, line);
  std::getline(summary, line);
  CHECK(line == "classical,10,10");
  CHECK(fs::exists(dir / "fig1.csv"));
  std::ostringstream log;
  CHECK(run_figures("fig2", dir, 1, log) == kExitConfig);
}
