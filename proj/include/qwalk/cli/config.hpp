#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qwalk/coined_walk.hpp"
#include "qwalk/continuous_walk.hpp"
#include "qwalk/decoherence.hpp"
#include "qwalk/graph.hpp"

namespace qwalk::cli {

inline constexpr const char* kVersion = "0.1.0";

// Environment variable holding the default worker count for sweeps and
// trajectory ensembles.
inline constexpr const char* kThreadsEnv = "QWALK_THREADS";

// Continuous-time runs diagonalize the full Hamiltonian.
inline constexpr int kMaxContinuousVertices = 4096;

enum class WalkKind { coined, continuous, classical };
enum class OutputFormat { csv, json };
enum class DecoherenceMode { density, trajectory };

std::string to_string(WalkKind kind);
std::string to_string(OutputFormat format);
std::string to_string(DecoherenceMode mode);

// Invalid configuration; field() is the dotted config key at fault.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct GraphConfig {
  GraphKind kind = GraphKind::line;
  // line: number of positions (odd; default 2 steps + 1 for discrete walks,
  // 201 for continuous). cycle: vertex count. hypercube: dimension.
  std::optional<int> size;
  int depth = 4;  // glued trees
  GlueMode glue = GlueMode::random_cycle;
  std::optional<std::uint64_t> glue_seed;  // defaults to the run seed
};

struct WalkConfig {
  WalkKind walk_kind = WalkKind::coined;
  GraphConfig graph;

  int steps = 100;  // coined and classical
  // continuous
  double time = 10.0;
  double dt = 0.01;  // grid for the glued-trees exit series
  double gamma = 1.0;
  HamiltonianConvention hamiltonian = HamiltonianConvention::laplacian;

  CoinKind coin = CoinKind::standard;
  std::string initial = "zero";    // preset: zero | uniform | symmetric
  std::vector<Complex> amplitudes;  // explicit coin state; overrides the preset
  // Coordinate on line and cycle, vertex index elsewhere. Default: origin,
  // or the entrance of glued trees, or vertex 0.
  std::optional<int> start;

  DecoherenceSpec decoherence;
  DecoherenceMode mode = DecoherenceMode::density;
  std::uint64_t trajectories = 10000;

  // classical: Monte Carlo hitting-time samples toward the glued-trees exit
  std::uint64_t hitting_samples = 0;
  long hitting_cap = 1'000'000;

  std::uint64_t seed = 1;
  std::string output = "qwalk.csv";
  OutputFormat format = OutputFormat::csv;
  unsigned threads = 1;
};

// Strict: unknown keys and wrong types raise ConfigError naming the key.
// Keys missing from j keep the values already in `base`.
WalkConfig config_from_json(const nlohmann::json& j, WalkConfig base = {});
nlohmann::json config_to_json(const WalkConfig& c);

// Checks every module precondition the run will hit. Throws ConfigError.
void validate(const WalkConfig& c);

// Default thread count: QWALK_THREADS if set and positive, else 1.
unsigned default_threads();

int line_positions(const WalkConfig& c);
Graph build_graph(const WalkConfig& c);
Vertex start_vertex(const WalkConfig& c, const Graph& g);
// Presets: zero (first coin direction), uniform (equal superposition over all
// ports) and symmetric ((|0> + i|1>)/sqrt(2), two ports only). Explicit
// amplitudes win over the preset.
std::vector<Complex> initial_coin(const WalkConfig& c, int ports);

}  // namespace qwalk::cli
