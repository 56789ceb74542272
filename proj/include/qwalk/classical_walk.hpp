#pragma once

#include <cstdint>
#include <vector>

#include "qwalk/graph.hpp"

namespace qwalk {

struct ClassicalDistribution {
  std::vector<double> probabilities;  // indexed by vertex
  int step_index = 0;
};

// Each step the mass at v splits evenly over v's ports, so interior line
// vertices do the fair +-1 walk and other graphs get the degree-weighted walk.
// Mass on a dangling line port raises BoundaryOverflow; nothing reflects.
ClassicalDistribution classical_step(const Graph& g, const ClassicalDistribution& d);

ClassicalDistribution evolve_classical_exact(const Graph& g, Vertex start, int steps);

// Vertex sequence of length steps + 1 with a seeded uniform port choice per step.
std::vector<Vertex> sample_walk(const Graph& g, Vertex start, int steps, std::uint64_t seed);

inline constexpr long kDefaultHittingCap = 1'000'000;

struct HittingTimeEstimate {
  double mean = 0.0;             // over walks that reached the target
  double standard_error = 0.0;
  std::uint64_t completed = 0;
  std::uint64_t censored = 0;    // walks that had not arrived after `cap` steps
};

// Monte Carlo first-passage time; sample k uses seed + k.
HittingTimeEstimate hitting_time(const Graph& g, Vertex start, Vertex target, std::uint64_t seed,
                                 std::uint64_t num_samples, long cap = kDefaultHittingCap,
                                 unsigned threads = 1);

inline constexpr int kMaxExactHittingVertices = 4096;

// Expected first-passage time to `target` from every vertex, by a dense solve of
// (I - Q) tau = 1 over the transient vertices. Entry `target` is 0.
std::vector<double> exact_hitting_times(const Graph& g, Vertex target);

}  // namespace qwalk
