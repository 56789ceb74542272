#include "qwalk/coined_walk.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {
constexpr double kInverseEdgeTolerance = 1e-12;
}  // namespace

WalkSpace::WalkSpace(Graph graph) : graph_(std::move(graph)) {
  const int n = graph_.vertex_count();
  offsets_.resize(n);
  std::size_t offset = 0;
  for (Vertex v = 0; v < n; ++v) {
    offsets_[v] = offset;
    for (int c = 0; c < graph_.port_count(v); ++c) {
      position_of_.push_back(v);
      coin_of_.push_back(c);
    }
    offset += static_cast<std::size_t>(graph_.port_count(v));
  }

  shift_target_.assign(offset, kNoIndex);
  shift_source_.assign(offset, kNoIndex);
  for (std::size_t i = 0; i < offset; ++i) {
    const Vertex u = position_of_[i];
    const Vertex v = graph_.ports(u)[coin_of_[i]];
    if (v == kNoVertex) continue;
    const auto back = graph_.ports(v);
    const auto it = std::find(back.begin(), back.end(), u);
    if (it == back.end()) throw InvariantViolation("asymmetric port lists at vertex " + std::to_string(v));
    int arrival = static_cast<int>(it - back.begin());
    if (back.size() == 2) arrival = 1 - arrival;
    const std::size_t j = offsets_[v] + static_cast<std::size_t>(arrival);
    if (shift_source_[j] != kNoIndex) throw InvariantViolation("shift is not a permutation");
    shift_target_[i] = j;
    shift_source_[j] = i;
  }
}

std::size_t WalkSpace::index(Vertex v, int coin) const {
  if (!graph_.valid(v)) throw InvalidArgument("vertex " + std::to_string(v) + " out of range");
  if (coin < 0 || coin >= graph_.port_count(v)) {
    throw InvalidArgument("coin index " + std::to_string(coin) + " out of range at vertex " +
                          std::to_string(v));
  }
  return offsets_[v] + static_cast<std::size_t>(coin);
}

std::shared_ptr<const WalkSpace> make_walk_space(Graph graph) {
  return std::make_shared<const WalkSpace>(std::move(graph));
}

std::string to_string(CoinKind kind) {
  switch (kind) {
    case CoinKind::standard: return "standard";
    case CoinKind::hadamard: return "hadamard";
    case CoinKind::grover: return "grover";
    case CoinKind::dft: return "dft";
  }
  return "unknown";
}

bool CoinOp::supports(int dimension) const {
  if (dimension < 1) return false;
  return kind_ != CoinKind::hadamard || dimension == 2;
}

Eigen::MatrixXcd CoinOp::matrix(int dimension) const {
  if (!supports(dimension)) {
    throw UnsupportedDegree(to_string(kind_) + " coin is not defined for degree " +
                            std::to_string(dimension));
  }
  const CoinKind kind =
      kind_ == CoinKind::standard ? (dimension == 2 ? CoinKind::hadamard : CoinKind::grover) : kind_;
  Eigen::MatrixXcd m(dimension, dimension);
  switch (kind) {
    case CoinKind::hadamard: {
      const double h = 1.0 / std::sqrt(2.0);
      m << h, h, h, -h;
      break;
    }
    case CoinKind::grover:
      m.setConstant(2.0 / dimension);
      m.diagonal().array() -= 1.0;
      break;
    case CoinKind::dft: {
      const double scale = 1.0 / std::sqrt(static_cast<double>(dimension));
      for (int j = 0; j < dimension; ++j) {
        for (int k = 0; k < dimension; ++k) {
          m(j, k) = std::polar(scale, 2.0 * std::numbers::pi * j * k / dimension);
        }
      }
      break;
    }
    case CoinKind::standard:
      break;
  }
  return m;
}

PureState::PureState(std::shared_ptr<const WalkSpace> space, std::vector<Complex> amplitudes)
    : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
  if (!space_) throw InvalidArgument("state needs a walk space");
  if (amplitudes_.size() != space_->dimension()) {
    throw InvalidArgument("amplitude vector has " + std::to_string(amplitudes_.size()) +
                          " entries, basis has " + std::to_string(space_->dimension()));
  }
}

double PureState::norm() const {
  double sum = 0.0;
  for (const auto& a : amplitudes_) sum += std::norm(a);
  return std::sqrt(sum);
}

PureState initial_state(std::shared_ptr<const WalkSpace> space, Vertex position,
                        std::span<const Complex> coin_amplitudes) {
  if (!space) throw InvalidArgument("state needs a walk space");
  const Graph& g = space->graph();
  if (!g.valid(position)) throw InvalidArgument("start vertex out of range");
  const auto k = static_cast<std::size_t>(g.port_count(position));
  if (coin_amplitudes.size() != k) {
    throw InvalidArgument("coin state has " + std::to_string(coin_amplitudes.size()) +
                          " amplitudes, vertex has " + std::to_string(k) + " coin directions");
  }
  double norm2 = 0.0;
  for (const auto& a : coin_amplitudes) norm2 += std::norm(a);
  if (std::abs(std::sqrt(norm2) - 1.0) > kNormTolerance) {
    throw InvalidArgument("coin state is not normalized (norm " + std::to_string(std::sqrt(norm2)) + ")");
  }
  std::vector<Complex> amplitudes(space->dimension());
  const std::size_t offset = space->block_offset(position);
  std::copy(coin_amplitudes.begin(), coin_amplitudes.end(), amplitudes.begin() + offset);
  return PureState(std::move(space), std::move(amplitudes));
}

std::vector<Complex> coin_preset_zero() { return {1.0, 0.0}; }

std::vector<Complex> coin_preset_symmetric() {
  const double h = 1.0 / std::sqrt(2.0);
  return {Complex(h, 0.0), Complex(0.0, h)};
}

void apply_coin_blocks(const WalkSpace& space, const CoinOp& coin, std::span<const Complex> in,
                       std::span<Complex> out, bool adjoint) {
  const Graph& g = space.graph();
  std::map<int, Eigen::MatrixXcd> cache;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const int k = g.port_count(v);
    const std::size_t o = space.block_offset(v);
    const bool occupied = std::any_of(in.begin() + o, in.begin() + o + k,
                                      [](const Complex& a) { return a != Complex(0.0); });
    if (!occupied) {
      std::fill(out.begin() + o, out.begin() + o + k, Complex(0.0));
      continue;
    }
    auto it = cache.find(k);
    if (it == cache.end()) {
      Eigen::MatrixXcd m = coin.matrix(k);
      if (adjoint) m.adjointInPlace();
      it = cache.emplace(k, std::move(m)).first;
    }
    const Eigen::MatrixXcd& m = it->second;
    for (int r = 0; r < k; ++r) {
      Complex acc = 0.0;
      for (int c = 0; c < k; ++c) acc += m(r, c) * in[o + c];
      out[o + r] = acc;
    }
  }
}

PureState coin_toss(const PureState& s, const CoinOp& coin) {
  std::vector<Complex> out(s.space().dimension());
  apply_coin_blocks(s.space(), coin, s.amplitudes(), out, false);
  return PureState(s.space_ptr(), std::move(out));
}

PureState shift(const PureState& s) {
  const WalkSpace& space = s.space();
  const auto in = s.amplitudes();
  std::vector<Complex> out(space.dimension());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == Complex(0.0)) continue;
    const std::size_t j = space.shift_target(i);
    if (j == kNoIndex) {
      throw BoundaryOverflow("amplitude reached the end of the line at x=" +
                             std::to_string(space.graph().coordinate(space.position_of(i))));
    }
    out[j] = in[i];
  }
  return PureState(s.space_ptr(), std::move(out));
}

PureState step(const PureState& s, const CoinOp& coin) { return shift(coin_toss(s, coin)); }

PureState inverse_step(const PureState& s, const CoinOp& coin) {
  const WalkSpace& space = s.space();
  const auto in = s.amplitudes();
  std::vector<Complex> unshifted(space.dimension());
  for (std::size_t j = 0; j < in.size(); ++j) {
    if (in[j] == Complex(0.0)) continue;
    const std::size_t i = space.shift_source(j);
    if (i == kNoIndex) {
      // Running backwards, edge sites cancel only up to roundoff.
      if (std::abs(in[j]) < kInverseEdgeTolerance) continue;
      throw BoundaryOverflow("inverse shift left the line window");
    }
    unshifted[i] = in[j];
  }
  std::vector<Complex> out(space.dimension());
  apply_coin_blocks(space, coin, unshifted, out, true);
  return PureState(s.space_ptr(), std::move(out));
}

PureState evolve(const PureState& s, const CoinOp& coin, int steps) {
  if (steps < 0) throw InvalidArgument("steps must be nonnegative");
  PureState current = s;
  for (int t = 0; t < steps; ++t) current = step(current, coin);
  return current;
}

}  // namespace qwalk
