#include "qwalk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "qwalk/errors.hpp"

namespace qwalk {

Distribution::Distribution(std::vector<double> probabilities, std::vector<int> coordinates,
                           DistributionMetadata metadata)
    : probabilities_(std::move(probabilities)),
      coordinates_(std::move(coordinates)),
      metadata_(std::move(metadata)) {
  if (!coordinates_.empty() && coordinates_.size() != probabilities_.size()) {
    throw InvalidArgument("coordinate list does not match the distribution size");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probabilities_.size(); ++i) {
    double& p = probabilities_[i];
    if (!std::isfinite(p)) throw InvariantViolation("non-finite probability at index " + std::to_string(i));
    if (p < 0.0) {
      if (p < -kNegativeClampTolerance) {
        throw InvariantViolation("negative probability " + std::to_string(p) + " at index " +
                                 std::to_string(i));
      }
      warnings_.push_back("clamped probability " + std::to_string(p) + " at index " + std::to_string(i));
      p = 0.0;
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kDistributionSumTolerance) {
    throw InvariantViolation("probabilities sum to " + std::to_string(total));
  }
}

std::vector<int> graph_coordinates(const Graph& g) {
  const auto c = g.coordinates();
  return {c.begin(), c.end()};
}

Distribution position_distribution(const PureState& s) {
  const WalkSpace& space = s.space();
  std::vector<double> p(static_cast<std::size_t>(space.graph().vertex_count()), 0.0);
  const auto a = s.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) p[space.position_of(i)] += std::norm(a[i]);
  return Distribution(std::move(p), graph_coordinates(space.graph()), {"coined"});
}

Distribution position_distribution(const DensityState& rho) {
  const WalkSpace& space = rho.space();
  std::vector<double> p(static_cast<std::size_t>(space.graph().vertex_count()), 0.0);
  const auto& m = rho.matrix();
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    p[space.position_of(i)] += m(k, k).real();
  }
  return Distribution(std::move(p), graph_coordinates(space.graph()), {"coined"});
}

Distribution position_distribution(const Graph& g, const ClassicalDistribution& d) {
  DistributionMetadata meta{"classical", static_cast<double>(d.step_index)};
  return Distribution(d.probabilities, graph_coordinates(g), meta);
}

Distribution uniform_distribution(const Graph& g) {
  const auto n = static_cast<std::size_t>(g.vertex_count());
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)), graph_coordinates(g));
}

namespace {

void require_coordinates(const Distribution& d) {
  if (!d.has_coordinates()) throw InvalidArgument("position space has no numeric coordinates");
}

}  // namespace

double std_dev(const Distribution& d) {
  require_coordinates(d);
  double second = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double x = d.coordinates()[i];
    second += d[i] * x * x;
  }
  return std::sqrt(second);
}

double mean_position(const Distribution& d) {
  require_coordinates(d);
  double mean = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) mean += d[i] * d.coordinates()[i];
  return mean;
}

double central_std_dev(const Distribution& d) {
  const double mean = mean_position(d);
  double var = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double dx = d.coordinates()[i] - mean;
    var += d[i] * dx * dx;
  }
  return std::sqrt(var);
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("distributions live on different spaces");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return 0.5 * sum;
}

double total_variation(const Distribution& a, const Distribution& b) {
  if (a.size() != b.size() || a.has_coordinates() != b.has_coordinates() ||
      !std::equal(a.coordinates().begin(), a.coordinates().end(), b.coordinates().begin(),
                  b.coordinates().end())) {
    throw InvalidArgument("distributions live on different spaces");
  }
  return total_variation(a.probabilities(), b.probabilities());
}

void TimeAverage::add(std::span<const double> p) {
  if (p.size() != sum_.size()) throw InvalidArgument("distribution size mismatch");
  for (std::size_t i = 0; i < p.size(); ++i) sum_[i] += p[i];
  ++count_;
}

std::vector<double> TimeAverage::average() const {
  if (count_ == 0) throw InvalidArgument("empty time average");
  std::vector<double> out(sum_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sum_[i] / static_cast<double>(count_);
  return out;
}

Distribution time_averaged(std::span<const Distribution> series) {
  if (series.empty()) throw InvalidArgument("time average of an empty series");
  const Distribution& first = series.front();
  TimeAverage average(first.size());
  for (const auto& d : series) {
    if (d.size() != first.size() ||
        !std::equal(d.coordinates().begin(), d.coordinates().end(), first.coordinates().begin(),
                    first.coordinates().end())) {
      throw InvalidArgument("time series mixes position spaces");
    }
    average.add(d.probabilities());
  }
  DistributionMetadata meta = series.back().metadata();
  const auto c = first.coordinates();
  return Distribution(average.average(), {c.begin(), c.end()}, meta);
}

DistributionStream coined_stream(const PureState& s0, const CoinOp& coin) {
  auto state = std::make_shared<PureState>(s0);
  return [state, coin]() {
    *state = step(*state, coin);
    return position_distribution(*state).probabilities();
  };
}

DistributionStream density_stream(const DensityState& rho0, const CoinOp& coin,
                                  const DecoherenceSpec& spec) {
  validate(spec);
  if (rho0.space().dimension() > kMaxDensityDimension) {
    throw InvalidArgument("basis too large for density evolution");
  }
  auto rho = std::make_shared<DensityState>(rho0);
  return [rho, coin, spec]() {
    *rho = apply_channel(unitary_step(*rho, coin), spec);
    return position_distribution(*rho).probabilities();
  };
}

DistributionStream classical_stream(const Graph& g, Vertex start) {
  auto current = std::make_shared<ClassicalDistribution>(evolve_classical_exact(g, start, 0));
  auto graph = std::make_shared<const Graph>(g);
  return [current, graph]() {
    *current = classical_step(*graph, *current);
    return current->probabilities;
  };
}

MixingResult mixing_time(const DistributionStream& walk, std::span<const double> target,
                         double epsilon, long t_max) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (t_max < 1) throw InvalidArgument("t_max must be positive");
  // distance[T - 1] = TV(average up to T, target)
  std::vector<double> distance;
  TimeAverage average(target.size());
  auto extend_to = [&](long horizon) {
    while (static_cast<long>(distance.size()) < horizon) {
      average.add(walk());
      distance.push_back(total_variation(average.average(), target));
    }
  };

  MixingResult result;
  for (long T = 1; T <= t_max; ++T) {
    extend_to(T);
    if (distance[T - 1] > epsilon) continue;
    const long width = std::min(2 * T, t_max) - T;
    bool stable = true;
    for (int k = 1; k <= kMixingWindowSamples && width > 0; ++k) {
      const long sample = T + (k * width + kMixingWindowSamples - 1) / kMixingWindowSamples;
      extend_to(sample);
      if (distance[sample - 1] > epsilon) {
        stable = false;
        break;
      }
    }
    if (stable) {
      result.time = T;
      break;
    }
  }
  result.evaluated = static_cast<long>(distance.size());
  result.final_distance = distance.empty() ? 1.0 : distance.back();
  return result;
}

Flatness flatness(const Distribution& d, std::optional<int> parity, int ratio_radius) {
  std::vector<int> site_coord;
  std::vector<double> mass;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const int x = d.has_coordinates() ? d.coordinates()[i] : static_cast<int>(i);
    if (parity && ((x % 2) + 2) % 2 != ((*parity % 2) + 2) % 2) continue;
    site_coord.push_back(x);
    mass.push_back(d[i]);
  }
  // Windows are contiguous runs in coordinate order.
  std::vector<std::size_t> order(site_coord.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return site_coord[a] < site_coord[b]; });
  std::vector<double> q(order.size());
  std::vector<int> xs(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    q[k] = mass[order[k]];
    xs[k] = site_coord[order[k]];
  }

  Flatness result;
  const std::size_t n = q.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = prefix[k] + q[k];
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const double level = 1.0 / static_cast<double>(b - a + 1);
      double inside = 0.0;
      for (std::size_t k = a; k <= b; ++k) inside += std::abs(q[k] - level);
      const double outside = prefix[a] + (prefix[n] - prefix[b + 1]);
      const double tv = 0.5 * (inside + outside);
      if (tv < result.window_distance) {
        result.window_distance = tv;
        result.window_low = xs[a];
        result.window_high = xs[b];
      }
    }
  }

  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(xs[k]) > ratio_radius || q[k] <= 0.0) continue;
    hi = std::max(hi, q[k]);
    lo = std::min(lo, q[k]);
  }
  result.max_min_ratio = hi > 0.0 ? hi / lo : 0.0;
  return result;
}

}  // namespace qwalk
