// qwalk: command-line front end for the walk simulators.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qwalk/cli/config.hpp"
#include "qwalk/cli/runner.hpp"

using nlohmann::json;
using namespace qwalk::cli;

namespace {

// Flags left unset stay out of the overlay, so the config file (or the
// built-in default) wins for them.
struct WalkFlags {
  std::optional<std::string> config;
  std::optional<std::string> walk_kind, graph, glue, hamiltonian, coin, initial, target, mode, output, format;
  std::optional<int> size, depth, steps, start;
  std::optional<unsigned long long> glue_seed, seed;
  std::optional<double> time, dt, gamma, p, hitting_cap;
  std::optional<long long> trajectories, hitting_samples;
  std::optional<unsigned> threads;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON config file; flags given here override it");
    app->add_option("--walk-kind", walk_kind, "coined, continuous or classical");
    app->add_option("--graph", graph, "line, cycle, hypercube or glued_trees");
    app->add_option("--size", size, "positions on the line, vertices on the cycle, dimension of the hypercube");
    app->add_option("--depth", depth, "glued-trees depth");
    app->add_option("--glue", glue, "glued-trees join: random-cycle or symmetric");
    app->add_option("--glue-seed", glue_seed, "seed for the random join (default: --seed)");
    app->add_option("--steps", steps, "discrete steps");
    app->add_option("--time", time, "continuous-time horizon");
    app->add_option("--dt", dt, "sampling interval of the exit-probability series");
    app->add_option("--gamma", gamma, "continuous-time hopping rate");
    app->add_option("--hamiltonian", hamiltonian, "laplacian or adjacency");
    app->add_option("--coin", coin, "standard, hadamard, grover or dft");
    app->add_option("--initial", initial, "coin preset: zero, uniform or symmetric");
    app->add_option("--start", start, "start coordinate (line, cycle) or vertex index");
    app->add_option("--p", p, "measurement probability per step");
    app->add_option("--target", target, "what is measured: position, coin or both");
    app->add_option("--mode", mode, "density or trajectory");
    app->add_option("--trajectories", trajectories, "trajectory count in trajectory mode");
    app->add_option("--hitting-samples", hitting_samples, "Monte Carlo hitting-time samples (classical glued trees)");
    app->add_option("--hitting-cap", hitting_cap, "step cap per hitting-time sample");
    app->add_option("--seed", seed, "base seed");
    app->add_option("-o,--output", output, "distribution file");
    app->add_option("--format", format, "csv or json");
    app->add_option("--threads", threads, std::string("worker threads (default: $") + kThreadsEnv + " or 1)");
  }

  WalkConfig resolve() const {
    WalkConfig c;
    c.threads = default_threads();
    if (config) {
      std::ifstream in(*config);
      if (!in) throw ConfigError("config", "cannot read " + *config);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ConfigError("config", e.what());
      }
      c = config_from_json(j, c);
    }
    json o = json::object();
    auto put = [](json& target, const char* key, const auto& value) {
      if (value) target[key] = *value;
    };
    json g = json::object();
    put(g, "kind", graph);
    put(g, "size", size);
    put(g, "depth", depth);
    put(g, "glue", glue);
    put(g, "glue_seed", glue_seed);
    if (!g.empty()) o["graph"] = g;
    json d = json::object();
    put(d, "p", p);
    put(d, "target", target);
    put(d, "mode", mode);
    if (!d.empty()) o["decoherence"] = d;
    put(o, "walk_kind", walk_kind);
    put(o, "steps", steps);
    put(o, "time", time);
    put(o, "dt", dt);
    put(o, "gamma", gamma);
    put(o, "hamiltonian", hamiltonian);
    put(o, "coin", coin);
    put(o, "initial", initial);
    put(o, "start", start);
    put(o, "trajectories", trajectories);
    put(o, "hitting_samples", hitting_samples);
    put(o, "hitting_cap", hitting_cap);
    put(o, "seed", seed);
    put(o, "output", output);
    put(o, "format", format);
    put(o, "threads", threads);
    return config_from_json(o, c);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coined, continuous-time and classical walk simulator"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  WalkFlags walk_flags;
  auto* walk = app.add_subcommand("walk", "run a single walk and write its distribution");
  walk_flags.attach(walk);

  WalkFlags sweep_flags;
  std::string axis;
  std::vector<std::string> values;
  auto* sweep = app.add_subcommand("sweep", "run one walk per value of a parameter");
  sweep_flags.attach(sweep);
  sweep->add_option("--axis", axis, "p, steps, size or depth")->required();
  sweep->add_option("--values", values, "comma-separated values")->delimiter(',');

  int trace_steps = 3;
  std::string trace_coin = "hadamard";
  std::string trace_initial = "zero";
  bool trace_csv = false;
  auto* trace = app.add_subcommand("trace", "print the amplitudes after each coin toss and shift");
  trace->add_option("--steps", trace_steps, "steps to trace (0..20)")->capture_default_str();
  trace->add_option("--coin", trace_coin, "coin")->capture_default_str();
  trace->add_option("--initial", trace_initial, "coin preset")->capture_default_str();
  trace->add_flag("--csv", trace_csv, "emit t,stage,x,coin,re,im rows instead of kets");

  std::string figure = "all";
  std::string figure_dir = "figures";
  std::optional<unsigned> figure_threads;
  auto* figures = app.add_subcommand("figures", "write the data behind the line-walk figures");
  figures->add_option("which", figure, "fig1, fig3 or all")->capture_default_str();
  figures->add_option("-d,--dir", figure_dir, "output directory")->capture_default_str();
  figures->add_option("--threads", figure_threads, std::string("worker threads (default: $") + kThreadsEnv + " or 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*walk) {
    WalkConfig c;
    const int rc = guarded(std::cerr, [&]() {
      c = walk_flags.resolve();
      return static_cast<int>(kExitOk);
    });
    return rc != kExitOk ? rc : run_walk(c, std::cerr);
  }
  if (*sweep) {
    WalkConfig c;
    const int rc = guarded(std::cerr, [&]() {
      c = sweep_flags.resolve();
      return static_cast<int>(kExitOk);
    });
    if (rc != kExitOk) return rc;
    std::erase(values, std::string());
    return run_sweep(c, axis, values, std::cerr);
  }
  if (*trace) {
    WalkConfig c;
    const int rc = guarded(std::cerr, [&]() {
      c = config_from_json(json{{"coin", trace_coin}, {"initial", trace_initial}});
      return static_cast<int>(kExitOk);
    });
    return rc != kExitOk ? rc : run_trace(trace_steps, c, trace_csv, std::cout, std::cerr);
  }
  return run_figures(figure, figure_dir, figure_threads.value_or(default_threads()), std::cerr);
}
