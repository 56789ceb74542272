// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "qwalk/classical_walk.hpp"
#include "qwalk/cli/output.hpp"
#include "qwalk/cli/runner.hpp"
#include "qwalk/coined_walk.hpp"
#include "qwalk/continuous_walk.hpp"
#include "qwalk/decoherence.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/stats.hpp"

using namespace qwalk;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail] " << what << "; ";
    }
  }
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------------------
// 1. Printed amplitudes of the first three Hadamard steps, compared literally.
void criterion1(Outcome& o) {
  using Ket = std::map<std::pair<int, int>, double>;
  const double r2 = std::sqrt(2.0);
  const double r8 = std::sqrt(8.0);
  const std::vector<std::pair<int, Ket>> printed{
      {1, {{{-1, 0}, 1 / r2}, {{1, 1}, 1 / r2}}},
      {2, {{{-2, 0}, 0.5}, {{0, 1}, 0.5}, {{0, 0}, 0.5}, {{2, 1}, -0.5}}},
      {3, {{{-3, 0}, 1 / r8}, {{-1, 1}, 1 / r8}, {{-1, 0}, 2 / r8}, {{1, 0}, 1 / r8}, {{3, 1}, -1 / r8}}}};

  auto space = make_walk_space(build_line(7));
  const CoinOp h(CoinKind::hadamard);
  PureState s = initial_state(space, *space->graph().vertex_at(0), coin_preset_zero());
  int t = 0;
  for (const auto& [target_t, ket] : printed) {
    while (t < target_t) {
      s = step(s, h);
      ++t;
    }
    for (std::size_t i = 0; i < space->dimension(); ++i) {
      const int x = space->graph().coordinate(space->position_of(i));
      const int c = space->coin_of(i);
      const auto it = ket.find({x, c});
      const Complex expected = it == ket.end() ? 0.0 : it->second;
      const Complex got = s.amplitudes()[i];
      if (std::abs(got - expected) > 1e-12) {
        o.require(false, "t=" + std::to_string(t) + " |" + std::to_string(x) + "," + std::to_string(c) +
                             "> expected " + fmt(expected.real()) + " got " + fmt(got.real()));
      }
    }
  }
}

// 2. Classical sigma = sqrt(t); quantum sigma doubles with t.
void criterion2(Outcome& o) {
  const Graph line = build_line(201);
  const Vertex origin = *line.vertex_at(0);
  for (int t : {4, 16, 64, 100}) {
    const Distribution d = position_distribution(line, evolve_classical_exact(line, origin, t));
    const double sd = std_dev(d);
    o.require(std::abs(sd - std::sqrt(t)) <= 1e-12 * std::sqrt(t), "classical t=" + std::to_string(t) + " sigma " + fmt(sd));
  }
  auto space = make_walk_space(build_line(1601));
  const CoinOp h(CoinKind::hadamard);
  PureState s = initial_state(space, *space->graph().vertex_at(0), coin_preset_zero());
  std::map<int, double> sigma;
  for (int t = 1; t <= 800; ++t) {
    s = step(s, h);
    if (t == 100 || t == 200 || t == 400 || t == 800) sigma[t] = std_dev(position_distribution(s));
  }
  for (int t : {100, 200, 400}) {
    const double ratio = sigma[2 * t] / sigma[t];
    o.detail << "q sigma(" << 2 * t << ")/sigma(" << t << ")=" << fmt(ratio) << "; ";
    o.require(ratio >= 1.9 && ratio <= 2.1, "quantum ratio at t=" + std::to_string(t));
  }
}

// 3. Measuring everything every step reproduces the classical walk.
void criterion3(Outcome& o) {
  const CoinOp h(CoinKind::hadamard);
  const DecoherenceSpec full{1.0, MeasurementTarget::both};
  for (const Graph& g : {build_line(201), build_cycle(15)}) {
    auto space = make_walk_space(g);
    const Vertex start = *space->graph().vertex_at(0);
    double worst = 0.0;
    evolve_density(to_density(initial_state(space, start, coin_preset_zero())), h, full, 100,
                   [&](int t, const DensityState& rho) {
                     const auto q = position_distribution(rho).probabilities();
                     const auto c = evolve_classical_exact(space->graph(), start, t).probabilities;
                     for (std::size_t v = 0; v < q.size(); ++v) worst = std::max(worst, std::abs(q[v] - c[v]));
                   });
    o.detail << space->graph().description() << " max |diff|=" << fmt(worst) << "; ";
    o.require(worst < 1e-10, space->graph().description());
  }
}

// 4. Decoherence sweep at t=100: flattest at intermediate p, spread shrinking.
void criterion4(Outcome& o) {
  const std::vector<double> ps{0.0, 0.003, 0.01, 0.03, 0.1};
  auto space = make_walk_space(build_line(201));
  const auto rho0 = to_density(initial_state(space, *space->graph().vertex_at(0), coin_preset_zero()));
  const CoinOp h(CoinKind::hadamard);
  std::vector<double> flat(ps.size()), sd(ps.size());
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    pool.emplace_back([&, k] {
      const Distribution d = position_distribution(evolve_density(rho0, h, {ps[k], MeasurementTarget::both}, 100));
      flat[k] = flatness(d, 0).window_distance;
      sd[k] = std_dev(d);
    });
  }
  for (auto& t : pool) t.join();
  const std::size_t best = static_cast<std::size_t>(std::min_element(flat.begin(), flat.end()) - flat.begin());
  for (std::size_t k = 0; k < ps.size(); ++k) o.detail << "p=" << ps[k] << " tv=" << fmt(flat[k]) << " sd=" << fmt(sd[k]) << "; ";
  o.require(best > 0 && best + 1 < ps.size(), "flatness minimum at an endpoint");
  o.require(ps[best] >= 0.01 && ps[best] <= 0.1, "flatness minimum outside [0.01, 0.1]");
  for (std::size_t k = 1; k < ps.size(); ++k) o.require(sd[k] < sd[k - 1], "std_dev not decreasing at p=" + fmt(ps[k]));
}

// 5. Cycle mixing, with and without decoherence.
void criterion5(Outcome& o) {
  const CoinOp h(CoinKind::hadamard);
  auto odd = make_walk_space(build_cycle(15));
  const auto u15 = uniform_distribution(odd->graph());
  const PureState s15 = initial_state(odd, 0, coin_preset_zero());
  const auto quantum = mixing_time(coined_stream(s15, h), u15.probabilities());
  const auto classical = mixing_time(classical_stream(odd->graph(), 0), u15.probabilities());
  o.require(quantum.time.has_value(), "quantum cycle(15) did not mix");
  o.require(classical.time.has_value(), "classical cycle(15) did not mix");
  if (quantum.time && classical.time) {
    o.detail << "cycle(15) quantum " << *quantum.time << " classical " << *classical.time << "; ";
    o.require(*quantum.time < *classical.time, "quantum not faster");
  }

  const std::vector<double> ps{0.01, 0.02, 0.05, 0.1, 0.2};
  std::vector<MixingResult> noisy(ps.size());
  std::vector<std::thread> pool;
  const auto rho15 = to_density(s15);
  for (std::size_t k = 0; k < ps.size(); ++k) {
    pool.emplace_back([&, k] {
      noisy[k] = mixing_time(density_stream(rho15, h, {ps[k], MeasurementTarget::both}), u15.probabilities());
    });
  }

  auto even = make_walk_space(build_cycle(16));
  const auto u16 = uniform_distribution(even->graph());
  const PureState s16 = initial_state(even, 0, coin_preset_zero());
  const auto even_pure = mixing_time(coined_stream(s16, h), u16.probabilities());
  const auto even_noisy =
      mixing_time(density_stream(to_density(s16), h, {0.1, MeasurementTarget::both}), u16.probabilities());
  for (auto& t : pool) t.join();

  long best = -1;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    if (noisy[k].time && (best < 0 || *noisy[k].time < best)) best = *noisy[k].time;
  }
  o.detail << "best p>0 " << best << "; ";
  o.require(best >= 0 && quantum.time && best <= *quantum.time, "no p in (0, 0.2] mixes as fast as p=0");
  o.detail << "cycle(16) p=0 " << (even_pure.time ? std::to_string(*even_pure.time) : "not reached by t=" + std::to_string(even_pure.evaluated) + " (TV " + fmt(even_pure.final_distance) + ")")
           << ", p=0.1 " << (even_noisy.time ? std::to_string(*even_noisy.time) : "not reached") << "; ";
  o.require(!even_pure.time.has_value(), "cycle(16) p=0 mixed");
  o.require(even_noisy.time.has_value(), "cycle(16) p=0.1 did not mix");
}

// 6. Glued trees: linear quantum peak times, super-linear classical hitting.
void criterion6(Outcome& o) {
  struct Frozen {
    int depth;
    double max_probability;
    double first_peak_time;
  };
  const Frozen frozen[] = {{2, 0.6456859499, 2.543},
                           {3, 0.5564574506, 3.336},
                           {4, 0.4937213293, 4.093},
                           {5, 0.5967390055, 4.846},
                           {6, 0.4126182809, 5.593}};
  std::vector<double> depth, peak, hit;
  for (const Frozen& f : frozen) {
    const GlueSpec glue{GlueMode::random_cycle, 1};
    const ExitPeak p = find_exit_peak(exit_probability_series(f.depth, glue, 1.0, 4.0 * f.depth, 0.001));
    o.require(std::abs(p.max_probability - f.max_probability) < 1e-8 && std::abs(p.first_peak_time - f.first_peak_time) < 1e-9,
              "depth " + std::to_string(f.depth) + " differs from frozen data");
    const Graph g = build_glued_trees(f.depth, glue);
    depth.push_back(f.depth);
    peak.push_back(p.first_peak_time);
    hit.push_back(exact_hitting_times(g, glued_exit(g))[glued_entrance(g)]);
  }
  const double n = static_cast<double>(depth.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < depth.size(); ++k) {
    sx += depth[k];
    sy += peak[k];
    sxx += depth[k] * depth[k];
    sxy += depth[k] * peak[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  o.detail << "peak slope " << fmt(slope) << " local";
  for (std::size_t k = 1; k < peak.size(); ++k) {
    const double local = peak[k] - peak[k - 1];
    o.detail << ' ' << fmt(local);
    o.require(std::abs(local - slope) <= 0.2 * slope, "local slope off the fit by more than 20%");
  }
  o.detail << "; hitting";
  for (std::size_t k = 0; k < hit.size(); ++k) o.detail << ' ' << fmt(hit[k]);
  for (std::size_t k = 2; k < hit.size(); ++k) {
    o.require(hit[k] - hit[k - 1] > hit[k - 1] - hit[k - 2], "hitting-time increments not growing");
  }
  const double classical_ratio = hit.back() / hit.front();
  const double quantum_ratio = peak.back() / peak.front();
  o.detail << "; ratios classical " << fmt(classical_ratio) << " quantum " << fmt(quantum_ratio) << "; ";
  o.require(classical_ratio >= 4.0 * quantum_ratio, "classical/quantum growth separation below 4x");
}

// 7. Cross-checks between independent methods, invariants and determinism.
void criterion7(Outcome& o) {
  const CoinOp h(CoinKind::hadamard);
  {
    const int steps = 50;
    const std::uint64_t count = 100000;
    auto space = make_walk_space(build_line(2 * steps + 1));
    const PureState s = initial_state(space, *space->graph().vertex_at(0), coin_preset_zero());
    const DecoherenceSpec spec{0.1, MeasurementTarget::both};
    const auto exact = position_distribution(evolve_density(to_density(s), h, spec, steps)).probabilities();
    const auto counts = trajectory_histogram(s, h, spec, steps, 2024, count, worker_count());
    int outside = 0;
    for (std::size_t v = 0; v < counts.size(); ++v) {
      const double p = exact[v];
      const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(count));
      const double observed = counts[v] / static_cast<double>(count);
      if (std::abs(observed - p) > 3.0 * se + 0.5 / static_cast<double>(count)) ++outside;
    }
    o.detail << "trajectory bins outside 3 sigma: " << outside << "; ";
    o.require(outside == 0, "trajectory ensemble disagrees with density");
  }
  {
    const Graph line = build_line(41);
    const Vertex origin = *line.vertex_at(0);
    const int samples = 100000;
    std::vector<double> histogram(static_cast<std::size_t>(line.vertex_count()), 0.0);
    for (int k = 0; k < samples; ++k) histogram[sample_walk(line, origin, 20, 1000 + k).back()] += 1.0 / samples;
    const double tv = total_variation(histogram, evolve_classical_exact(line, origin, 20).probabilities);
    o.detail << "sampled classical TV " << fmt(tv) << "; ";
    o.require(tv < 0.01, "sampled classical walk TV");
  }
  {
    auto space = make_walk_space(build_cycle(9));
    PureState s = initial_state(space, 0, coin_preset_symmetric());
    double norm_error = 0.0;
    for (int t = 0; t < 1000; ++t) {
      s = step(s, h);
      norm_error = std::max(norm_error, std::abs(s.norm() - 1.0));
    }
    double trace = 0.0, herm = 0.0, eig = 0.0;
    for (auto target : {MeasurementTarget::position, MeasurementTarget::coin, MeasurementTarget::both}) {
      evolve_density(to_density(initial_state(space, 0, coin_preset_zero())), h, {0.05, target}, 1000,
                     [&](int, const DensityState& rho) {
                       const DensityCheck c = check_density(rho);
                       trace = std::max(trace, c.trace_error);
                       herm = std::max(herm, c.hermiticity_error);
                       eig = std::min(eig, c.min_eigenvalue);
                     });
    }
    o.detail << "1000-step norm " << fmt(norm_error) << " trace " << fmt(trace) << " herm " << fmt(herm) << " min eig "
             << fmt(eig) << "; ";
    o.require(norm_error < 1e-10 && trace < 1e-10 && herm < 1e-12 && eig > -1e-10, "invariants over 1000 steps");
  }
  {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("qwalk_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    cli::WalkConfig c;
    c.steps = 60;
    c.decoherence = {0.05, MeasurementTarget::both};
    c.mode = cli::DecoherenceMode::trajectory;
    c.trajectories = 5000;
    c.threads = worker_count();
    bool same = true;
    for (const char* name : {"a", "b"}) {
      c.output = (dir / (std::string(name) + ".csv")).string();
      c.threads = name[0] == 'a' ? worker_count() : 1;
      same = same && cli::run_walk(c, std::cerr) == cli::kExitOk;
    }
    for (const char* suffix : {".csv", ".csv.summary.json", ".csv.record.csv"}) {
      same = same && cli::read_file(dir / (std::string("a") + suffix)) == cli::read_file(dir / (std::string("b") + suffix));
    }
    fs::remove_all(dir);
    o.require(same, "re-runs differ");
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "printed amplitudes at t=1,2,3", 0.001, criterion1},
      {2, "spreading exponents", 1.0, criterion2},
      {3, "classical limit at p=1", 30.0, criterion3},
      {4, "decoherence sweep shape at t=100", 300.0, criterion4},
      {5, "odd- and even-cycle mixing", 600.0, criterion5},
      {6, "glued-trees separation", 60.0, criterion6},
      {7, "oracle consistency", 600.0, criterion7},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto begin = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    o.require(seconds < c.budget_seconds, "runtime over budget");
    failures += o.pass ? 0 : 1;
    std::cout << "criterion " << c.id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << c.name << "  (" << fmt(seconds)
              << " s of " << fmt(c.budget_seconds) << " s)  " << o.detail.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
