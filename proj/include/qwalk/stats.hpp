#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/classical_walk.hpp"
#include "qwalk/coined_walk.hpp"
#include "qwalk/decoherence.hpp"

namespace qwalk {

struct DistributionMetadata {
  std::string walk_kind;
  double t = 0.0;
  double p = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr double kDistributionSumTolerance = 1e-10;
inline constexpr double kNegativeClampTolerance = 1e-12;

// Probability law over the vertices of a graph. Entries in [-1e-12, 0) are
// clamped to zero and counted in warnings(); anything more negative, or a total
// off by more than 1e-10, throws InvariantViolation.
class Distribution {
 public:
  explicit Distribution(std::vector<double> probabilities, std::vector<int> coordinates = {},
               DistributionMetadata metadata = {});

  std::span<const double> probabilities() const& { return probabilities_; }
  // On a temporary, hand the storage over instead of a dangling view.
  std::vector<double> probabilities() && { return std::move(probabilities_); }
  double operator[](std::size_t i) const { return probabilities_[i]; }
  std::size_t size() const { return probabilities_.size(); }

  bool has_coordinates() const { return !coordinates_.empty(); }
  std::span<const int> coordinates() const& { return coordinates_; }
  std::vector<int> coordinates() && { return std::move(coordinates_); }

  const DistributionMetadata& metadata() const { return metadata_; }
  DistributionMetadata& metadata() { return metadata_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::vector<double> probabilities_;
  std::vector<int> coordinates_;
  DistributionMetadata metadata_;
  std::vector<std::string> warnings_;
};

std::vector<int> graph_coordinates(const Graph& g);

Distribution position_distribution(const PureState& s);
Distribution position_distribution(const DensityState& rho);
Distribution position_distribution(const Graph& g, const ClassicalDistribution& d);

Distribution uniform_distribution(const Graph& g);

// sqrt(sum P(x) x^2): the second moment about the origin.
double std_dev(const Distribution& d);
// Standard deviation about the mean.
double central_std_dev(const Distribution& d);
double mean_position(const Distribution& d);

double total_variation(std::span<const double> a, std::span<const double> b);
double total_variation(const Distribution& a, const Distribution& b);

// (1/T) sum_{t=1}^{T} P(x, t).
Distribution time_averaged(std::span<const Distribution> series);

// Running version of time_averaged over raw probability vectors.
class TimeAverage {
 public:
  explicit TimeAverage(std::size_t size) : sum_(size, 0.0) {}
  void add(std::span<const double> p);
  std::vector<double> average() const;
  long count() const { return count_; }

 private:
  std::vector<double> sum_;
  long count_ = 0;
};

// Each call returns P(., t) for the next t = 1, 2, ...
using DistributionStream = std::function<std::vector<double>()>;

DistributionStream coined_stream(const PureState& s0, const CoinOp& coin);
DistributionStream density_stream(const DensityState& rho0, const CoinOp& coin,
                                  const DecoherenceSpec& spec);
DistributionStream classical_stream(const Graph& g, Vertex start);

inline constexpr double kDefaultMixingEpsilon = 0.01;
inline constexpr long kDefaultMixingTMax = 100'000;
inline constexpr int kMixingWindowSamples = 10;

struct MixingResult {
  std::optional<long> time;  // nullopt: not reached by t_max
  double final_distance = 0.0;  // TV of the last computed average to the target
  long evaluated = 0;           // number of distributions drawn from the stream
};

// Smallest T <= t_max with TV(time-averaged P up to T, target) <= epsilon such
// that the bound also holds at T + ceil(k W / 10), k = 1..10, where
// W = min(2T, t_max) - T.
MixingResult mixing_time(const DistributionStream& walk, std::span<const double> target,
                         double epsilon = kDefaultMixingEpsilon, long t_max = kDefaultMixingTMax);

struct Flatness {
  double window_distance = 1.0;  // TV to the closest uniform window
  int window_low = 0;            // window bounds, as coordinates (or vertices)
  int window_high = 0;
  // max/min over occupied (nonzero) sites in [-ratio_radius, ratio_radius];
  // 0 when none is occupied.
  double max_min_ratio = 0.0;
};

// Flatness of a distribution. When `parity` is set only sites with that
// coordinate parity count as sites (a walk on the line alternates parity).
Flatness flatness(const Distribution& d, std::optional<int> parity = std::nullopt,
                  int ratio_radius = 60);

}  // namespace qwalk
