#include "qwalk/classical_walk.hpp"

#include <cmath>
#include <exception>
#include <thread>

#include <Eigen/Dense>

#include "qwalk/errors.hpp"
#include "qwalk/rng.hpp"

namespace qwalk {

ClassicalDistribution classical_step(const Graph& g, const ClassicalDistribution& d) {
  const int n = g.vertex_count();
  if (static_cast<int>(d.probabilities.size()) != n) throw InvalidArgument("distribution size mismatch");
  ClassicalDistribution next{std::vector<double>(static_cast<std::size_t>(n), 0.0), d.step_index + 1};
  for (Vertex v = 0; v < n; ++v) {
    const double mass = d.probabilities[v];
    if (mass == 0.0) continue;
    const auto ports = g.ports(v);
    if (ports.empty()) {
      next.probabilities[v] += mass;
      continue;
    }
    const double share = mass / static_cast<double>(ports.size());
    for (Vertex u : ports) {
      if (u == kNoVertex) {
        throw BoundaryOverflow("probability reached the end of the line at x=" +
                               std::to_string(g.coordinate(v)));
      }
      next.probabilities[u] += share;
    }
  }
  return next;
}

ClassicalDistribution evolve_classical_exact(const Graph& g, Vertex start, int steps) {
  if (!g.valid(start)) throw InvalidArgument("start vertex out of range");
  if (steps < 0) throw InvalidArgument("steps must be nonnegative");
  ClassicalDistribution d{std::vector<double>(static_cast<std::size_t>(g.vertex_count()), 0.0), 0};
  d.probabilities[start] = 1.0;
  for (int t = 0; t < steps; ++t) d = classical_step(g, d);
  return d;
}

namespace {

Vertex random_move(const Graph& g, Vertex v, Rng& rng) {
  const auto ports = g.ports(v);
  if (ports.empty()) return v;
  const Vertex u = ports[rng.uniform_index(ports.size())];
  if (u == kNoVertex) throw BoundaryOverflow("sampled walk left the line window");
  return u;
}

}  // namespace

std::vector<Vertex> sample_walk(const Graph& g, Vertex start, int steps, std::uint64_t seed) {
  if (!g.valid(start)) throw InvalidArgument("start vertex out of range");
  if (steps < 0) throw InvalidArgument("steps must be nonnegative");
  Rng rng(seed);
  std::vector<Vertex> path{start};
  path.reserve(static_cast<std::size_t>(steps) + 1);
  for (int t = 0; t < steps; ++t) path.push_back(random_move(g, path.back(), rng));
  return path;
}

HittingTimeEstimate hitting_time(const Graph& g, Vertex start, Vertex target, std::uint64_t seed,
                                 std::uint64_t num_samples, long cap, unsigned threads) {
  if (!g.valid(start) || !g.valid(target)) throw InvalidArgument("vertex out of range");
  if (num_samples < 1) throw InvalidArgument("need at least one sample");
  if (cap < 1) throw InvalidArgument("cap must be positive");
  threads = std::max(1u, threads);

  struct Partial {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t completed = 0;
    std::uint64_t censored = 0;
  };
  std::vector<Partial> partial(threads);
  std::vector<std::exception_ptr> errors(threads);

  auto work = [&](unsigned worker) {
    try {
      for (std::uint64_t k = worker; k < num_samples; k += threads) {
        Rng rng(seed + k);
        Vertex v = start;
        long t = 0;
        while (v != target && t < cap) {
          v = random_move(g, v, rng);
          ++t;
        }
        if (v == target) {
          partial[worker].sum += static_cast<double>(t);
          partial[worker].sum_sq += static_cast<double>(t) * static_cast<double>(t);
          ++partial[worker].completed;
        } else {
          ++partial[worker].censored;
        }
      }
    } catch (...) {
      errors[worker] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Partial total;
  for (const auto& p : partial) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
    total.completed += p.completed;
    total.censored += p.censored;
  }
  HittingTimeEstimate estimate;
  estimate.completed = total.completed;
  estimate.censored = total.censored;
  if (total.completed > 0) {
    const auto n = static_cast<double>(total.completed);
    estimate.mean = total.sum / n;
    if (total.completed > 1) {
      const double variance = std::max(0.0, (total.sum_sq - n * estimate.mean * estimate.mean) / (n - 1.0));
      estimate.standard_error = std::sqrt(variance / n);
    }
  }
  return estimate;
}

std::vector<double> exact_hitting_times(const Graph& g, Vertex target) {
  if (!g.valid(target)) throw InvalidArgument("target vertex out of range");
  const int n = g.vertex_count();
  if (n > kMaxExactHittingVertices) {
    throw InvalidArgument("exact hitting times are limited to " +
                          std::to_string(kMaxExactHittingVertices) + " vertices");
  }
  // Transient vertices are every vertex but the target, in order.
  auto transient_index = [target](Vertex v) { return v < target ? v : v - 1; };
  const int m = n - 1;
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(m, m);
  for (Vertex v = 0; v < n; ++v) {
    if (v == target) continue;
    const auto ports = g.ports(v);
    for (Vertex u : ports) {
      if (u == kNoVertex) throw BoundaryOverflow("absorbing chain needs a graph without dangling ports");
      if (u == target) continue;
      system(transient_index(v), transient_index(u)) -= 1.0 / static_cast<double>(ports.size());
    }
  }
  const Eigen::VectorXd tau = system.partialPivLu().solve(Eigen::VectorXd::Ones(m));
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (Vertex v = 0; v < n; ++v) {
    if (v != target) out[v] = tau[transient_index(v)];
  }
  return out;
}

}  // namespace qwalk
