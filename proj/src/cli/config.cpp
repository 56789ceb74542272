#include "qwalk/cli/config.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include "qwalk/errors.hpp"

namespace qwalk::cli {

using nlohmann::json;

std::string to_string(WalkKind kind) {
  switch (kind) {
    case WalkKind::coined: return "coined";
    case WalkKind::continuous: return "continuous";
    case WalkKind::classical: return "classical";
  }
  return "unknown";
}

std::string to_string(OutputFormat format) { return format == OutputFormat::csv ? "csv" : "json"; }

std::string to_string(DecoherenceMode mode) {
  return mode == DecoherenceMode::density ? "density" : "trajectory";
}

namespace {

template <typename E>
E parse_enum(const std::string& field, const std::string& text, std::initializer_list<E> options) {
  std::string names;
  for (E e : options) {
    if (to_string(e) == text) return e;
    names += (names.empty() ? "" : ", ") + to_string(e);
  }
  throw ConfigError(field, "unknown value '" + text + "' (expected one of " + names + ")");
}

const std::initializer_list<WalkKind> kWalkKinds{WalkKind::coined, WalkKind::continuous, WalkKind::classical};
const std::initializer_list<GraphKind> kGraphKinds{GraphKind::line, GraphKind::cycle, GraphKind::hypercube,
                                                   GraphKind::glued_trees};
const std::initializer_list<GlueMode> kGlueModes{GlueMode::symmetric, GlueMode::random_cycle};
const std::initializer_list<CoinKind> kCoinKinds{CoinKind::standard, CoinKind::hadamard, CoinKind::grover,
                                                 CoinKind::dft};
const std::initializer_list<HamiltonianConvention> kConventions{HamiltonianConvention::laplacian,
                                                                HamiltonianConvention::adjacency};
const std::initializer_list<MeasurementTarget> kTargets{MeasurementTarget::position, MeasurementTarget::coin,
                                                        MeasurementTarget::both};
const std::initializer_list<DecoherenceMode> kModes{DecoherenceMode::density, DecoherenceMode::trajectory};
const std::initializer_list<OutputFormat> kFormats{OutputFormat::csv, OutputFormat::json};

// Field access that reports the dotted key on failure.
class Reader {
 public:
  Reader(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw ConfigError(prefix_.empty() ? "config" : prefix_, "expected an object");
  }

  void allow(std::set<std::string> keys) {
    for (const auto& [key, value] : j_.items()) {
      if (!keys.contains(key)) throw ConfigError(name(key), "unknown key");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& at(const std::string& key) const { return j_.at(key); }
  std::string name(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  template <typename T>
  void get(const std::string& key, T& out) const {
    if (!has(key)) return;
    out = as<T>(key);
  }

  template <typename T>
  void get(const std::string& key, std::optional<T>& out) const {
    if (!has(key)) return;
    out = as<T>(key);
  }

  template <typename E>
  void get_enum(const std::string& key, E& out, std::initializer_list<E> options) const {
    if (!has(key)) return;
    out = parse_enum(name(key), as<std::string>(key), options);
  }

  template <typename T>
  T as(const std::string& key) const {
    const json& v = j_.at(key);
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(name(key), "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(name(key), "expected a number");
      return v.get<double>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(name(key), "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned() || v.get<long long>() >= 0) return v.get<T>();
        throw ConfigError(name(key), "expected a nonnegative integer");
      } else {
        const auto x = v.get<long long>();
        if (x < std::numeric_limits<T>::min() || x > std::numeric_limits<T>::max()) {
          throw ConfigError(name(key), "integer out of range");
        }
        return static_cast<T>(x);
      }
    }
  }

 private:
  const json& j_;
  std::string prefix_;
};

std::vector<Complex> parse_amplitudes(const json& v) {
  if (!v.is_array() || v.empty()) throw ConfigError("initial", "expected a preset name or a list of [re, im] pairs");
  std::vector<Complex> out;
  for (const auto& pair : v) {
    if (pair.is_number()) {
      out.emplace_back(pair.get<double>(), 0.0);
    } else if (pair.is_array() && pair.size() == 2 && pair[0].is_number() && pair[1].is_number()) {
      out.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    } else {
      throw ConfigError("initial", "each amplitude must be a number or an [re, im] pair");
    }
  }
  return out;
}

}  // namespace

WalkConfig config_from_json(const json& j, WalkConfig c) {
  Reader r(j, "");
  r.allow({"walk_kind", "graph", "steps", "time", "dt", "gamma", "hamiltonian", "coin", "initial", "start",
           "decoherence", "trajectories", "hitting_samples", "hitting_cap", "seed", "output", "format",
           "threads"});
  r.get_enum("walk_kind", c.walk_kind, kWalkKinds);
  if (r.has("graph")) {
    Reader g(r.at("graph"), "graph");
    g.allow({"kind", "size", "depth", "glue", "glue_seed"});
    g.get_enum("kind", c.graph.kind, kGraphKinds);
    g.get("size", c.graph.size);
    g.get("depth", c.graph.depth);
    g.get_enum("glue", c.graph.glue, kGlueModes);
    g.get("glue_seed", c.graph.glue_seed);
  }
  r.get("steps", c.steps);
  r.get("time", c.time);
  r.get("dt", c.dt);
  r.get("gamma", c.gamma);
  r.get_enum("hamiltonian", c.hamiltonian, kConventions);
  r.get_enum("coin", c.coin, kCoinKinds);
  if (r.has("initial")) {
    if (r.at("initial").is_string()) {
      c.initial = r.as<std::string>("initial");
      c.amplitudes.clear();
    } else {
      c.amplitudes = parse_amplitudes(r.at("initial"));
    }
  }
  r.get("start", c.start);
  if (r.has("decoherence")) {
    Reader d(r.at("decoherence"), "decoherence");
    d.allow({"p", "target", "mode"});
    d.get("p", c.decoherence.p);
    d.get_enum("target", c.decoherence.target, kTargets);
    d.get_enum("mode", c.mode, kModes);
  }
  r.get("trajectories", c.trajectories);
  r.get("hitting_samples", c.hitting_samples);
  r.get("hitting_cap", c.hitting_cap);
  r.get("seed", c.seed);
  r.get("output", c.output);
  r.get_enum("format", c.format, kFormats);
  r.get("threads", c.threads);
  return c;
}

json config_to_json(const WalkConfig& c) {
  json graph{{"kind", to_string(c.graph.kind)}, {"depth", c.graph.depth}, {"glue", to_string(c.graph.glue)}};
  graph["size"] = c.graph.size ? json(*c.graph.size) : json(nullptr);
  graph["glue_seed"] = c.graph.glue_seed ? json(*c.graph.glue_seed) : json(nullptr);
  json initial;
  if (c.amplitudes.empty()) {
    initial = c.initial;
  } else {
    initial = json::array();
    for (const auto& a : c.amplitudes) initial.push_back({a.real(), a.imag()});
  }
  return json{{"walk_kind", to_string(c.walk_kind)},
              {"graph", graph},
              {"steps", c.steps},
              {"time", c.time},
              {"dt", c.dt},
              {"gamma", c.gamma},
              {"hamiltonian", to_string(c.hamiltonian)},
              {"coin", to_string(c.coin)},
              {"initial", initial},
              {"start", c.start ? json(*c.start) : json(nullptr)},
              {"decoherence",
               {{"p", c.decoherence.p}, {"target", to_string(c.decoherence.target)}, {"mode", to_string(c.mode)}}},
              {"trajectories", c.trajectories},
              {"hitting_samples", c.hitting_samples},
              {"hitting_cap", c.hitting_cap},
              {"seed", c.seed},
              {"output", c.output},
              {"format", to_string(c.format)},
              {"threads", c.threads}};
}

unsigned default_threads() {
  const char* env = std::getenv(kThreadsEnv);
  if (env == nullptr) return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || n < 1) return 1;
  return static_cast<unsigned>(n);
}

int line_positions(const WalkConfig& c) {
  if (c.graph.size) return *c.graph.size;
  return c.walk_kind == WalkKind::continuous ? 201 : 2 * c.steps + 1;
}

Graph build_graph(const WalkConfig& c) {
  switch (c.graph.kind) {
    case GraphKind::line: return build_line(line_positions(c));
    case GraphKind::cycle: return build_cycle(c.graph.size.value_or(0));
    case GraphKind::hypercube: return build_hypercube(c.graph.size.value_or(0));
    case GraphKind::glued_trees:
      return build_glued_trees(c.graph.depth, {c.graph.glue, c.graph.glue_seed.value_or(c.seed)});
  }
  throw ConfigError("graph.kind", "unsupported");
}

Vertex start_vertex(const WalkConfig& c, const Graph& g) {
  if (g.kind() == GraphKind::line || g.kind() == GraphKind::cycle) {
    const auto v = g.vertex_at(c.start.value_or(0));
    if (!v) throw ConfigError("start", "position " + std::to_string(c.start.value_or(0)) + " is not on the graph");
    return *v;
  }
  if (!c.start) return g.kind() == GraphKind::glued_trees ? glued_entrance(g) : 0;
  if (!g.valid(*c.start)) throw ConfigError("start", "vertex " + std::to_string(*c.start) + " out of range");
  return *c.start;
}

std::vector<Complex> initial_coin(const WalkConfig& c, int ports) {
  if (!c.amplitudes.empty()) return c.amplitudes;
  if (c.initial == "zero") {
    std::vector<Complex> a(static_cast<std::size_t>(std::max(ports, 1)), 0.0);
    a[0] = 1.0;
    return a;
  }
  if (c.initial == "uniform") return std::vector<Complex>(static_cast<std::size_t>(std::max(ports, 1)), 1.0 / std::sqrt(std::max(ports, 1)));
  if (c.initial == "symmetric") {
    if (ports != 2) throw ConfigError("initial", "the symmetric preset needs a vertex with 2 coin directions");
    return coin_preset_symmetric();
  }
  throw ConfigError("initial", "unknown preset '" + c.initial + "' (expected zero, uniform or symmetric)");
}

void validate(const WalkConfig& c) {
  const bool discrete = c.walk_kind != WalkKind::continuous;
  if (discrete && c.steps < 0) throw ConfigError("steps", "must be nonnegative");
  if (!discrete) {
    if (!(c.time >= 0.0) || !std::isfinite(c.time)) throw ConfigError("time", "must be a finite nonnegative number");
    if (!(c.dt > 0.0)) throw ConfigError("dt", "must be positive");
    if (!(c.gamma > 0.0) || !std::isfinite(c.gamma)) throw ConfigError("gamma", "must be positive");
  }

  switch (c.graph.kind) {
    case GraphKind::line: {
      const int n = line_positions(c);
      if (n < 1 || n % 2 == 0) throw ConfigError("graph.size", "line needs an odd, positive number of positions");
      if (discrete && n < 2 * c.steps + 1) {
        throw ConfigError("graph.size", "line of " + std::to_string(n) + " positions is too short for " +
                                            std::to_string(c.steps) + " steps (need " +
                                            std::to_string(2 * c.steps + 1) + ")");
      }
      break;
    }
    case GraphKind::cycle:
      if (!c.graph.size) throw ConfigError("graph.size", "required for a cycle");
      if (*c.graph.size < 3) throw ConfigError("graph.size", "cycle needs at least 3 vertices");
      break;
    case GraphKind::hypercube:
      if (!c.graph.size) throw ConfigError("graph.size", "required for a hypercube (dimension)");
      if (*c.graph.size < 1 || *c.graph.size > 24) throw ConfigError("graph.size", "hypercube dimension must be in 1..24");
      break;
    case GraphKind::glued_trees:
      if (c.graph.depth < 1 || c.graph.depth > 20) throw ConfigError("graph.depth", "must be in 1..20");
      break;
  }

  const Graph g = build_graph(c);
  const Vertex start = start_vertex(c, g);

  if (c.walk_kind == WalkKind::continuous && g.vertex_count() > kMaxContinuousVertices) {
    throw ConfigError(c.graph.kind == GraphKind::glued_trees ? "graph.depth" : "graph.size",
                      "continuous walk limited to " + std::to_string(kMaxContinuousVertices) + " vertices");
  }

  if (c.decoherence.p < 0.0 || c.decoherence.p > 1.0 || std::isnan(c.decoherence.p)) {
    throw ConfigError("decoherence.p", "must lie in [0, 1]");
  }
  if (c.walk_kind != WalkKind::coined && c.decoherence.p > 0.0) {
    throw ConfigError("decoherence.p", "decoherence applies to the coined walk only");
  }

  if (c.walk_kind == WalkKind::coined) {
    std::set<int> dims;
    for (Vertex v = 0; v < g.vertex_count(); ++v) dims.insert(g.port_count(v));
    const CoinOp coin(c.coin);
    for (int d : dims) {
      if (!coin.supports(d)) {
        throw ConfigError("coin", to_string(c.coin) + " coin is not defined for " + std::to_string(d) +
                                      " coin directions on this graph");
      }
    }
    const auto amps = initial_coin(c, g.port_count(start));
    if (static_cast<int>(amps.size()) != g.port_count(start)) {
      throw ConfigError("initial", "coin state has " + std::to_string(amps.size()) + " amplitudes, start vertex has " +
                                       std::to_string(g.port_count(start)) + " coin directions");
    }
    double norm2 = 0.0;
    for (const auto& a : amps) norm2 += std::norm(a);
    if (std::abs(std::sqrt(norm2) - 1.0) > kNormTolerance) throw ConfigError("initial", "coin state is not normalized");

    if (c.decoherence.p > 0.0) {
      if (c.mode == DecoherenceMode::density) {
        const auto dimension = WalkSpace(g).dimension();
        if (dimension > kMaxDensityDimension) {
          throw ConfigError("decoherence.mode", "basis dimension " + std::to_string(dimension) + " exceeds the density limit of " +
                                                    std::to_string(kMaxDensityDimension) + "; use trajectory mode");
        }
      } else if (c.trajectories < 1) {
        throw ConfigError("trajectories", "need at least one trajectory");
      }
    }
  } else if (c.amplitudes.empty() && c.initial != "zero" && c.initial != "uniform" && c.initial != "symmetric") {
    (void)initial_coin(c, 2);
  }

  if (c.hitting_samples > 0) {
    if (c.walk_kind != WalkKind::classical || c.graph.kind != GraphKind::glued_trees) {
      throw ConfigError("hitting_samples", "hitting times are sampled for classical walks on glued trees");
    }
    if (c.hitting_cap < 1) throw ConfigError("hitting_cap", "must be positive");
  }
  if (c.threads < 1) throw ConfigError("threads", "must be at least 1");
  if (c.output.empty()) throw ConfigError("output", "path must not be empty");
}

}  // namespace qwalk::cli
