#include "qwalk/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "qwalk/cli/output.hpp"
#include "qwalk/classical_walk.hpp"
#include "qwalk/errors.hpp"

namespace qwalk::cli {

using nlohmann::json;

namespace {

// Jobs are claimed in index order; the first failure (by index) is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next++;
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < count; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::optional<int> occupied_parity(const WalkConfig& c) {
  if (c.graph.kind == GraphKind::line && c.walk_kind != WalkKind::continuous) return c.steps % 2;
  return std::nullopt;
}

json summarize(const WalkConfig& c, const Graph& g, const Distribution& d) {
  json s;
  s["walk_kind"] = to_string(c.walk_kind);
  s["graph"] = g.description();
  if (c.walk_kind == WalkKind::continuous) {
    s["time"] = c.time;
    s["gamma"] = c.gamma;
  } else {
    s["steps"] = c.steps;
  }
  if (c.walk_kind == WalkKind::coined) {
    s["coin"] = to_string(c.coin);
    s["p"] = c.decoherence.p;
    s["target"] = to_string(c.decoherence.target);
    if (c.decoherence.p > 0.0) s["mode"] = to_string(c.mode);
    if (c.decoherence.p > 0.0 && c.mode == DecoherenceMode::trajectory) s["trajectories"] = c.trajectories;
  }
  s["seed"] = c.seed;
  if (d.has_coordinates()) {
    s["std_dev"] = std_dev(d);
    s["mean"] = mean_position(d);
    s["central_std_dev"] = central_std_dev(d);
  } else {
    s["std_dev"] = nullptr;
  }
  s["tv_to_uniform"] = total_variation(d.probabilities(), uniform_distribution(g).probabilities());
  const auto parity = occupied_parity(c);
  const Flatness f = flatness(d, parity);
  s["flatness"] = {{"window_distance", f.window_distance},
                   {"window_low", f.window_low},
                   {"window_high", f.window_high},
                   {"max_min_ratio", f.max_min_ratio},
                   {"ratio_radius", 60},
                   {"parity", parity ? json(*parity) : json(nullptr)}};
  s["warnings"] = d.warnings();
  return s;
}

}  // namespace

RunResult simulate(const WalkConfig& c) {
  validate(c);
  const Graph g = build_graph(c);
  const Vertex start = start_vertex(c, g);
  DistributionMetadata meta{to_string(c.walk_kind), c.walk_kind == WalkKind::continuous ? c.time : c.steps,
                            c.decoherence.p, c.seed};
  std::vector<ExitSample> exit_series;
  std::vector<MeasurementEvent> record;
  std::optional<Distribution> dist;

  switch (c.walk_kind) {
    case WalkKind::coined: {
      auto space = make_walk_space(g);
      const CoinOp coin(c.coin);
      const PureState s0 = initial_state(space, start, initial_coin(c, g.port_count(start)));
      if (c.decoherence.p == 0.0) {
        dist = position_distribution(evolve(s0, coin, c.steps));
      } else if (c.mode == DecoherenceMode::density) {
        dist = position_distribution(evolve_density(to_density(s0), coin, c.decoherence, c.steps));
      } else {
        const auto counts = trajectory_histogram(s0, coin, c.decoherence, c.steps, c.seed, c.trajectories, c.threads);
        std::vector<double> p(counts.size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(counts[i]) / static_cast<double>(c.trajectories);
        dist = Distribution(std::move(p), graph_coordinates(g));
        record = evolve_trajectory(s0, coin, c.decoherence, c.steps, c.seed).record;
      }
      break;
    }
    case WalkKind::classical:
      dist = position_distribution(g, evolve_classical_exact(g, start, c.steps));
      break;
    case WalkKind::continuous: {
      const Hamiltonian h = hamiltonian(g, c.gamma, c.hamiltonian);
      const Eigen::VectorXcd psi = evolve_ct(h, vertex_state(g.vertex_count(), start), c.time);
      std::vector<double> p(static_cast<std::size_t>(psi.size()));
      for (Eigen::Index i = 0; i < psi.size(); ++i) p[i] = std::norm(psi[i]);
      dist = Distribution(std::move(p), graph_coordinates(g));
      break;
    }
  }
  dist->metadata() = meta;

  json summary = summarize(c, g, *dist);
  if (g.kind() == GraphKind::glued_trees) {
    const GlueSpec glue{c.graph.glue, c.graph.glue_seed.value_or(c.seed)};
    if (c.walk_kind == WalkKind::continuous) {
      summary["exit_probability"] = (*dist)[glued_exit(g)];
      if (start == glued_entrance(g)) {
        exit_series = exit_probability_series(c.graph.depth, glue, c.gamma, c.time, c.dt, c.hamiltonian);
        const ExitPeak peak = find_exit_peak(exit_series);
        summary["exit_peak"] = {{"max_probability", peak.max_probability},
                                {"max_time", peak.max_time},
                                {"first_peak_time", peak.first_peak_time},
                                {"first_peak_probability", peak.first_peak_probability},
                                {"threshold_time", peak.threshold_time},
                                {"dt", c.dt}};
      }
    }
    if (c.walk_kind == WalkKind::classical) {
      if (g.vertex_count() <= kMaxExactHittingVertices) {
        summary["exact_hitting_time"] = exact_hitting_times(g, glued_exit(g))[start];
      }
      if (c.hitting_samples > 0) {
        const auto est = hitting_time(g, start, glued_exit(g), c.seed, c.hitting_samples, c.hitting_cap, c.threads);
        summary["sampled_hitting_time"] = {{"mean", est.mean},
                                           {"standard_error", est.standard_error},
                                           {"completed", est.completed},
                                           {"censored", est.censored},
                                           {"cap", c.hitting_cap}};
      }
    }
  }
  return {std::move(*dist), std::move(summary), std::move(exit_series), std::move(record)};
}

std::filesystem::path summary_path(const std::filesystem::path& output) {
  auto p = output;
  p += ".summary.json";
  return p;
}

std::filesystem::path meta_path(const std::filesystem::path& output) {
  auto p = output;
  p += ".meta.json";
  return p;
}

namespace {

json meta_record(const std::string& command, const json& config, double wall_seconds) {
  return {{"tool", "qwalk"},
          {"version", kVersion},
          {"command", command},
          {"config", config},
          {"wall_time_seconds", wall_seconds}};
}

void ensure_parent(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

}  // namespace

void write_run(const WalkConfig& c, const RunResult& r, double wall_seconds) {
  const std::filesystem::path out = c.output;
  ensure_parent(out);
  if (c.format == OutputFormat::csv) {
    write_file_atomic(out, distribution_csv(r.distribution));
  } else {
    json meta{{"walk_kind", to_string(c.walk_kind)},
              {"parameters", r.summary},
              {"seed", c.seed},
              {"version", kVersion}};
    meta["parameters"].erase("warnings");
    write_file_atomic(out, distribution_json(r.distribution, meta).dump(2) + "\n");
  }
  write_file_atomic(summary_path(out), r.summary.dump(2) + "\n");
  if (!r.exit_series.empty()) {
    std::ostringstream s;
    write_exit_series(s, r.exit_series);
    auto p = out;
    p += ".exit.csv";
    write_file_atomic(p, s.str());
  }
  if (!r.record.empty()) {
    std::ostringstream s;
    write_measurement_record(s, build_graph(c), r.record);
    auto p = out;
    p += ".record.csv";
    write_file_atomic(p, s.str());
  }
  write_file_atomic(meta_path(out), meta_record("walk", config_to_json(c), wall_seconds).dump(2) + "\n");
}

int guarded(std::ostream& log, const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    log << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    log << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnsupportedDegree& e) {
    log << "invalid configuration: coin: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvariantViolation& e) {
    log << "numerical invariant failed: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const BoundaryOverflow& e) {
    log << "numerical invariant failed: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int run_walk(const WalkConfig& c, std::ostream& log) {
  return guarded(log, [&]() {
    const auto begin = std::chrono::steady_clock::now();
    const RunResult r = simulate(c);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    write_run(c, r, wall);
    return static_cast<int>(kExitOk);
  });
}

namespace {

double parse_real(const std::string& field, const std::string& text) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(x)) throw ConfigError(field, "'" + text + "' is not a number");
  return x;
}

int parse_int(const std::string& field, const std::string& text) {
  const double x = parse_real(field, text);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError(field, "'" + text + "' is not an integer");
  return static_cast<int>(x);
}

std::string optional_cell(const json& j, const std::vector<std::string>& path) {
  const json* node = &j;
  for (const auto& key : path) {
    if (!node->is_object() || !node->contains(key)) return "";
    node = &node->at(key);
  }
  if (!node->is_number()) return "";
  return format_number(node->get<double>());
}

}  // namespace

int run_sweep(const WalkConfig& base, const std::string& axis, const std::vector<std::string>& values,
              std::ostream& log) {
  return guarded(log, [&]() {
    const auto begin = std::chrono::steady_clock::now();
    if (axis != "p" && axis != "steps" && axis != "size" && axis != "depth") {
      throw ConfigError("axis", "'" + axis + "' is not sweepable (expected p, steps, size or depth)");
    }
    if (values.empty()) throw ConfigError("values", "need at least one value");

    const std::filesystem::path out = base.output;
    const std::string stem = out.stem().string();
    const std::string ext = out.has_extension() ? out.extension().string() : (base.format == OutputFormat::csv ? ".csv" : ".json");
    const std::filesystem::path dir = out.has_parent_path() ? out.parent_path() : std::filesystem::path(".");

    const unsigned pool = std::max(1u, std::min<unsigned>(base.threads, static_cast<unsigned>(values.size())));
    std::vector<WalkConfig> runs;
    for (std::size_t k = 0; k < values.size(); ++k) {
      WalkConfig c = base;
      const std::string& v = values[k];
      if (axis == "p") {
        c.decoherence.p = parse_real("values", v);
      } else if (axis == "steps") {
        c.steps = parse_int("values", v);
      } else if (axis == "size") {
        c.graph.size = parse_int("values", v);
      } else {
        c.graph.depth = parse_int("values", v);
      }
      c.seed = base.seed + k;
      c.threads = std::max(1u, base.threads / pool);
      c.output = (dir / (stem + "_" + axis + v + ext)).string();
      validate(c);
      runs.push_back(std::move(c));
    }

    std::vector<json> summaries(runs.size());
    std::vector<double> walls(runs.size());
    parallel_for(runs.size(), pool, [&](std::size_t k) {
      const auto t0 = std::chrono::steady_clock::now();
      const RunResult r = simulate(runs[k]);
      walls[k] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      write_run(runs[k], r, walls[k]);
      summaries[k] = r.summary;
    });

    std::string table = axis +
                        ",seed,std_dev,tv_to_uniform,flatness_tv,max_min_ratio,first_peak_time,max_exit_probability,"
                        "threshold_time,exact_hitting_time,output\n";
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const json& s = summaries[k];
      table += values[k] + "," + std::to_string(runs[k].seed) + "," + optional_cell(s, {"std_dev"}) + "," +
               optional_cell(s, {"tv_to_uniform"}) + "," + optional_cell(s, {"flatness", "window_distance"}) + "," +
               optional_cell(s, {"flatness", "max_min_ratio"}) + "," + optional_cell(s, {"exit_peak", "first_peak_time"}) +
               "," + optional_cell(s, {"exit_peak", "max_probability"}) + "," +
               optional_cell(s, {"exit_peak", "threshold_time"}) + "," + optional_cell(s, {"exact_hitting_time"}) + "," +
               std::filesystem::path(runs[k].output).filename().string() + "\n";
    }
    std::filesystem::create_directories(dir);
    write_file_atomic(dir / (stem + "_summary.csv"), table);
    json config = config_to_json(base);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    json meta = meta_record("sweep", config, wall);
    meta["axis"] = axis;
    meta["values"] = values;
    write_file_atomic(dir / (stem + "_summary.meta.json"), meta.dump(2) + "\n");
    return static_cast<int>(kExitOk);
  });
}

namespace {

bool near_integer(double x) { return std::abs(x - std::round(x)) < 1e-9; }

std::string gaussian_integer(long re, long im) {
  if (im == 0) return std::to_string(re);
  if (re == 0) return (im == 1 ? "" : im == -1 ? "-" : std::to_string(im)) + "i";
  return "(" + std::to_string(re) + (im > 0 ? "+" : "-") + (std::abs(im) == 1 ? "" : std::to_string(std::abs(im))) + "i)";
}

// Terms sorted by position then coin; integer coefficients over a common
// sqrt(scale) when they exist, decimals otherwise.
std::string ket_string(const PureState& s, double scale2) {
  const WalkSpace& space = s.space();
  const double scale = std::sqrt(scale2);
  bool integral = near_integer(scale2);
  for (const auto& a : s.amplitudes()) integral = integral && near_integer(a.real() * scale) && near_integer(a.imag() * scale);
  std::string out;
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const Complex a = s.amplitudes()[i];
    if (std::abs(a) < 1e-12) continue;
    const std::string ket =
        "|" + std::to_string(space.graph().coordinate(space.position_of(i))) + "," + std::to_string(space.coin_of(i)) + ">";
    std::string term;
    bool negative = false;
    if (integral) {
      long re = std::lround(a.real() * scale);
      long im = std::lround(a.imag() * scale);
      if (re < 0 || (re == 0 && im < 0)) {
        negative = true;
        re = -re;
        im = -im;
      }
      const std::string coeff = gaussian_integer(re, im);
      term = (coeff == "1" ? "" : coeff) + ket;
    } else {
      std::ostringstream c;
      c << '(' << format_number(a.real()) << (a.imag() < 0 ? "-" : "+") << format_number(std::abs(a.imag())) << "i)";
      term = c.str() + ket;
    }
    if (out.empty()) {
      out = negative ? "-" + term : term;
    } else {
      out += (negative ? " - " : " + ") + term;
    }
  }
  if (integral && std::lround(scale2) != 1) {
    const long root = std::lround(scale);
    out = "(" + out + ")/" + (root * root == std::lround(scale2) ? std::to_string(root)
                                                                   : "sqrt(" + std::to_string(std::lround(scale2)) + ")");
  }
  return out;
}

}  // namespace

int run_trace(int steps, const WalkConfig& base, bool csv, std::ostream& out, std::ostream& log) {
  return guarded(log, [&]() {
    if (steps < 0 || steps > 20) throw ConfigError("steps", "trace is limited to 0..20 steps");
    WalkConfig c = base;
    c.walk_kind = WalkKind::coined;
    c.graph = GraphConfig{};
    c.graph.size = 2 * steps + 1;
    c.steps = steps;
    c.start = 0;
    c.decoherence = {};
    validate(c);
    auto space = make_walk_space(build_graph(c));
    const CoinOp coin(c.coin);
    const auto coin_state = initial_coin(c, 2);
    PureState s = initial_state(space, start_vertex(c, space->graph()), coin_state);

    // Common denominator: 1/sqrt(2) per Hadamard toss, times whatever the
    // initial coin state carries.
    double scale2 = 1.0;
    double smallest = 1.0;
    for (const auto& a : coin_state) {
      if (std::abs(a) > 1e-12) smallest = std::min(smallest, std::abs(a));
    }
    scale2 = 1.0 / (smallest * smallest);
    const bool hadamard_like = c.coin == CoinKind::hadamard || c.coin == CoinKind::standard;

    auto emit = [&](int t, const char* stage) {
      if (csv) {
        for (std::size_t i = 0; i < space->dimension(); ++i) {
          const Complex a = s.amplitudes()[i];
          if (a == Complex(0.0)) continue;
          out << t << ',' << stage << ',' << space->graph().coordinate(space->position_of(i)) << ','
              << space->coin_of(i) << ',' << format_number(a.real()) << ',' << format_number(a.imag()) << '\n';
        }
      } else {
        out << "t=" << t << ' ' << stage << std::string(8 - std::string(stage).size(), ' ') << ket_string(s, scale2)
            << '\n';
      }
    };
    if (csv) out << "t,stage,x,coin,re,im\n";
    emit(0, "initial");
    for (int t = 1; t <= steps; ++t) {
      s = coin_toss(s, coin);
      if (hadamard_like) scale2 *= 2.0;
      emit(t, "coin");
      s = shift(s);
      emit(t, "shift");
    }
    return static_cast<int>(kExitOk);
  });
}

namespace {

const std::vector<double> kFig3Probabilities{0.0, 0.003, 0.01, 0.03, 0.1, 1.0};

WalkConfig line_walk(WalkKind kind, const std::string& initial) {
  WalkConfig c;
  c.walk_kind = kind;
  c.steps = 100;
  c.coin = CoinKind::hadamard;
  c.initial = initial;
  return c;
}

// One row per even x in [-100, 100], one column per series.
std::string even_table(const std::vector<std::string>& names, const std::vector<const Distribution*>& series) {
  std::string out = "x";
  for (const auto& n : names) out += "," + n;
  out += '\n';
  for (int x = -100; x <= 100; x += 2) {
    out += std::to_string(x);
    for (const Distribution* d : series) {
      const auto c = d->coordinates();
      const auto it = std::find(c.begin(), c.end(), x);
      out += "," + format_number(it == c.end() ? 0.0 : (*d)[static_cast<std::size_t>(it - c.begin())]);
    }
    out += '\n';
  }
  return out;
}

void figure1(const std::filesystem::path& dir) {
  const std::vector<std::pair<std::string, WalkConfig>> runs{
      {"quantum_zero", line_walk(WalkKind::coined, "zero")},
      {"quantum_symmetric", line_walk(WalkKind::coined, "symmetric")},
      {"classical", line_walk(WalkKind::classical, "zero")}};
  std::vector<RunResult> results;
  std::vector<std::string> names;
  std::string summary = "series,std_dev,central_std_dev\n";
  for (const auto& [name, c] : runs) {
    results.push_back(simulate(c));
    names.push_back(name);
    write_file_atomic(dir / ("fig1_" + name + ".csv"), distribution_csv(results.back().distribution));
    summary += name + "," + format_number(std_dev(results.back().distribution)) + "," +
               format_number(central_std_dev(results.back().distribution)) + "\n";
  }
  std::vector<const Distribution*> series;
  for (const auto& r : results) series.push_back(&r.distribution);
  write_file_atomic(dir / "fig1.csv", even_table(names, series));
  write_file_atomic(dir / "fig1_summary.csv", summary);
}

void figure3(const std::filesystem::path& dir, unsigned threads) {
  const std::vector<MeasurementTarget> targets{MeasurementTarget::both, MeasurementTarget::position,
                                               MeasurementTarget::coin};
  const std::vector<std::string> presets{"zero", "symmetric"};
  std::vector<WalkConfig> runs;
  for (auto target : targets) {
    for (const auto& preset : presets) {
      for (double p : kFig3Probabilities) {
        WalkConfig c = line_walk(WalkKind::coined, preset);
        c.decoherence = {p, target};
        runs.push_back(c);
      }
    }
  }
  std::vector<std::optional<RunResult>> results(runs.size());
  parallel_for(runs.size(), threads, [&](std::size_t k) { results[k] = simulate(runs[k]); });

  std::string summary = "target,initial,p,std_dev,flatness_tv,window_low,window_high,max_min_ratio\n";
  std::size_t k = 0;
  for (auto target : targets) {
    for (const auto& preset : presets) {
      std::vector<std::string> names;
      std::vector<const Distribution*> series;
      for (double p : kFig3Probabilities) {
        const RunResult& r = *results[k++];
        names.push_back("p=" + format_number(p));
        series.push_back(&r.distribution);
        const Flatness f = flatness(r.distribution, 0);
        summary += to_string(target) + "," + preset + "," + format_number(p) + "," +
                   format_number(std_dev(r.distribution)) + "," + format_number(f.window_distance) + "," +
                   std::to_string(f.window_low) + "," + std::to_string(f.window_high) + "," +
                   format_number(f.max_min_ratio) + "\n";
      }
      write_file_atomic(dir / ("fig3_" + to_string(target) + "_" + preset + ".csv"), even_table(names, series));
    }
  }
  write_file_atomic(dir / "fig3_summary.csv", summary);
}

}  // namespace

int run_figures(const std::string& which, const std::filesystem::path& dir, unsigned threads, std::ostream& log) {
  return guarded(log, [&]() {
    if (which != "fig1" && which != "fig3" && which != "all") {
      throw ConfigError("figure", "'" + which + "' is not one of fig1, fig3, all");
    }
    const auto begin = std::chrono::steady_clock::now();
    std::filesystem::create_directories(dir);
    if (which == "fig1" || which == "all") figure1(dir);
    if (which == "fig3" || which == "all") figure3(dir, threads);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    json meta = meta_record("figures", json{{"figure", which}, {"steps", 100}, {"coin", "hadamard"}}, wall);
    meta["fig3_p"] = kFig3Probabilities;
    write_file_atomic(dir / ("figures_" + which + ".meta.json"), meta.dump(2) + "\n");
    return static_cast<int>(kExitOk);
  });
}

}  // namespace qwalk::cli
