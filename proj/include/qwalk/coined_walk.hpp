#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/graph.hpp"

namespace qwalk {

using Complex = std::complex<double>;

inline constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);

// The (position, coin) basis of a coined walk on one graph, together with the
// conditional-shift permutation on that basis. Shared by every state that lives
// on the graph; immutable.
//
// Shift convention: the amplitude on (u, c) moves to v = ports(u)[c]. On a
// vertex with two ports the coin keeps the direction of travel, so on the line
// S|x,0> = |x-1,0> and S|x,1> = |x+1,1>. On any other vertex the coin becomes
// the port at v that leads back to u. Both rules make the shift a permutation.
class WalkSpace {
 public:
  explicit WalkSpace(Graph graph);

  const Graph& graph() const { return graph_; }
  std::size_t dimension() const { return position_of_.size(); }

  std::size_t index(Vertex v, int coin) const;
  std::size_t block_offset(Vertex v) const { return offsets_[v]; }
  int block_size(Vertex v) const { return graph_.port_count(v); }

  Vertex position_of(std::size_t i) const { return position_of_[i]; }
  int coin_of(std::size_t i) const { return coin_of_[i]; }

  // Destination of basis state i under the shift, or kNoIndex for a dangling port.
  std::size_t shift_target(std::size_t i) const { return shift_target_[i]; }
  // Preimage of basis state i under the shift, or kNoIndex if nothing maps there.
  std::size_t shift_source(std::size_t i) const { return shift_source_[i]; }

 private:
  Graph graph_;
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> position_of_;
  std::vector<int> coin_of_;
  std::vector<std::size_t> shift_target_;
  std::vector<std::size_t> shift_source_;
};

std::shared_ptr<const WalkSpace> make_walk_space(Graph graph);

enum class CoinKind {
  standard,  // Hadamard on two-port vertices, Grover elsewhere
  hadamard,
  grover,
  dft,
};

std::string to_string(CoinKind kind);

class CoinOp {
 public:
  explicit CoinOp(CoinKind kind = CoinKind::standard) : kind_(kind) {}

  CoinKind kind() const { return kind_; }
  bool supports(int dimension) const;
  // Unitary acting on a coin register of the given dimension.
  // Throws UnsupportedDegree when the kind is not defined there.
  Eigen::MatrixXcd matrix(int dimension) const;

 private:
  CoinKind kind_;
};

// Wavefunction of a single walker over the (position, coin) basis.
class PureState {
 public:
  PureState(std::shared_ptr<const WalkSpace> space, std::vector<Complex> amplitudes);

  const WalkSpace& space() const { return *space_; }
  const std::shared_ptr<const WalkSpace>& space_ptr() const { return space_; }
  const Graph& graph() const { return space_->graph(); }

  std::span<const Complex> amplitudes() const { return amplitudes_; }
  Complex amplitude(Vertex v, int coin) const { return amplitudes_[space_->index(v, coin)]; }
  double norm() const;

 private:
  std::shared_ptr<const WalkSpace> space_;
  std::vector<Complex> amplitudes_;
};

inline constexpr double kNormTolerance = 1e-10;

// All amplitude on `position`, coin register set to coin_amplitudes.
PureState initial_state(std::shared_ptr<const WalkSpace> space, Vertex position,
                        std::span<const Complex> coin_amplitudes);

// Named coin presets: |0> and (|0> + i|1>)/sqrt(2).
std::vector<Complex> coin_preset_zero();
std::vector<Complex> coin_preset_symmetric();

PureState coin_toss(const PureState& s, const CoinOp& coin);
PureState shift(const PureState& s);
PureState step(const PureState& s, const CoinOp& coin);
// Undoes step(). Amplitudes below 1e-12 left on a dangling line port are
// cancellation residue and are dropped; anything larger is BoundaryOverflow.
PureState inverse_step(const PureState& s, const CoinOp& coin);

// (shift o coin_toss)^steps. No renormalization is applied.
PureState evolve(const PureState& s, const CoinOp& coin, int steps);

// Applies coin blocks in place to a basis vector (helper shared with density code).
void apply_coin_blocks(const WalkSpace& space, const CoinOp& coin,
                       std::span<const Complex> in, std::span<Complex> out, bool adjoint);

}  // namespace qwalk
