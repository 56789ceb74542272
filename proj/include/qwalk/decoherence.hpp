#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/coined_walk.hpp"
#include "qwalk/rng.hpp"

namespace qwalk {

// What a decohering measurement looks at.
enum class MeasurementTarget { position, coin, both };

std::string to_string(MeasurementTarget target);

// Measurement with probability p per time step.
struct DecoherenceSpec {
  double p = 0.0;
  MeasurementTarget target = MeasurementTarget::both;
};

void validate(const DecoherenceSpec& spec);

// Largest basis dimension the exact density evolution accepts (512 positions
// with a two-state coin). Larger systems go through evolve_trajectory.
inline constexpr std::size_t kMaxDensityDimension = 1024;

class DensityState {
 public:
  DensityState(std::shared_ptr<const WalkSpace> space, Eigen::MatrixXcd matrix);

  const WalkSpace& space() const { return *space_; }
  const std::shared_ptr<const WalkSpace>& space_ptr() const { return space_; }
  const Graph& graph() const { return space_->graph(); }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }

  Complex trace() const { return matrix_.trace(); }
  double purity() const;

 private:
  std::shared_ptr<const WalkSpace> space_;
  Eigen::MatrixXcd matrix_;
};

struct DensityCheck {
  double trace_error = 0.0;        // |tr(rho) - 1|
  double hermiticity_error = 0.0;  // max |rho - rho^dagger| entrywise
  double min_eigenvalue = 0.0;
};

// Full invariant audit; the eigenvalue part costs a dense diagonalization.
DensityCheck check_density(const DensityState& rho);

DensityState to_density(const PureState& s);

// rho -> (1 - p) rho + p sum_k P_k rho P_k over the target's projectors.
DensityState apply_channel(const DensityState& rho, const DecoherenceSpec& spec);

// rho -> U rho U^dagger for one coin-then-shift step.
DensityState unitary_step(const DensityState& rho, const CoinOp& coin);

// Called after each completed step with the step number (1-based).
using DensityObserver = std::function<void(int, const DensityState&)>;

// Each step: unitary step, then the decoherence channel. Throws
// InvariantViolation when the trace drifts by more than 1e-9.
DensityState evolve_density(const DensityState& rho0, const CoinOp& coin,
                            const DecoherenceSpec& spec, int steps,
                            const DensityObserver& observer = {});

struct MeasurementEvent {
  int step = 0;
  bool measured = false;
  std::optional<Vertex> position;
  std::optional<int> coin;
};

struct Trajectory {
  PureState state;
  std::vector<MeasurementEvent> record;
};

// One quantum trajectory: after each unitary step, with probability p, the
// target is measured projectively (outcome drawn from the Born rule) and the
// state collapses. Fully determined by the seed; see Rng.
Trajectory evolve_trajectory(const PureState& s0, const CoinOp& coin, const DecoherenceSpec& spec,
                             int steps, std::uint64_t seed);

// Samples a position from |psi|^2 using the given generator.
Vertex sample_position(const PureState& s, Rng& rng);

// Histogram (counts per vertex) of final positions over `count` trajectories,
// trajectory k seeded with seed + k and its final position drawn from a second
// generator seeded (seed + k) ^ 0x9e3779b97f4a7c15. Work is split across `threads` workers; results merge by summation.
std::vector<std::uint64_t> trajectory_histogram(const PureState& s0, const CoinOp& coin,
                                                const DecoherenceSpec& spec, int steps,
                                                std::uint64_t seed, std::uint64_t count,
                                                unsigned threads = 1);

// CSV with header "step,measured,position,coin"; unmeasured fields are empty.
// Positions are coordinates when the graph has them, vertex indices otherwise.
void write_measurement_record(std::ostream& out, const Graph& g,
                              const std::vector<MeasurementEvent>& record);

}  // namespace qwalk
