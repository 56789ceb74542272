#include "qwalk/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <thread>

#include "qwalk/errors.hpp"

namespace qwalk {

std::string to_string(MeasurementTarget target) {
  switch (target) {
    case MeasurementTarget::position: return "position";
    case MeasurementTarget::coin: return "coin";
    case MeasurementTarget::both: return "both";
  }
  return "unknown";
}

void validate(const DecoherenceSpec& spec) {
  if (!(spec.p >= 0.0 && spec.p <= 1.0)) {
    throw InvalidArgument("decoherence probability must lie in [0, 1], got " + std::to_string(spec.p));
  }
}

DensityState::DensityState(std::shared_ptr<const WalkSpace> space, Eigen::MatrixXcd matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  if (!space_) throw InvalidArgument("density state needs a walk space");
  const auto d = static_cast<Eigen::Index>(space_->dimension());
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw InvalidArgument("density matrix shape does not match the basis dimension");
  }
}

double DensityState::purity() const {
  // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
  return matrix_.squaredNorm();
}

DensityCheck check_density(const DensityState& rho) {
  const Eigen::MatrixXcd& m = rho.matrix();
  DensityCheck check;
  check.trace_error = std::abs(m.trace() - Complex(1.0));
  check.hermiticity_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  check.min_eigenvalue = solver.eigenvalues().minCoeff();
  return check;
}

DensityState to_density(const PureState& s) {
  const auto a = s.amplitudes();
  const Eigen::Map<const Eigen::VectorXcd> psi(a.data(), static_cast<Eigen::Index>(a.size()));
  return DensityState(s.space_ptr(), psi * psi.adjoint());
}

namespace {

bool same_sector(const WalkSpace& space, MeasurementTarget target, std::size_t i, std::size_t j) {
  switch (target) {
    case MeasurementTarget::position: return space.position_of(i) == space.position_of(j);
    case MeasurementTarget::coin: return space.coin_of(i) == space.coin_of(j);
    case MeasurementTarget::both: return i == j;
  }
  return false;
}

void check_dimension(const WalkSpace& space) {
  if (space.dimension() > kMaxDensityDimension) {
    throw InvalidArgument("basis dimension " + std::to_string(space.dimension()) +
                          " exceeds the density-matrix limit of " +
                          std::to_string(kMaxDensityDimension) + "; use trajectory mode");
  }
}

}  // namespace

DensityState apply_channel(const DensityState& rho, const DecoherenceSpec& spec) {
  validate(spec);
  if (spec.p == 0.0) return rho;
  const WalkSpace& space = rho.space();
  Eigen::MatrixXcd m = rho.matrix();
  const double keep = 1.0 - spec.p;
  const auto d = static_cast<std::size_t>(m.rows());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < d; ++i) {
      if (!same_sector(space, spec.target, i, j)) m(i, j) *= keep;
    }
  }
  return DensityState(rho.space_ptr(), std::move(m));
}

DensityState unitary_step(const DensityState& rho, const CoinOp& coin) {
  const WalkSpace& space = rho.space();
  const Graph& g = space.graph();
  Eigen::MatrixXcd m = rho.matrix();

  std::map<int, Eigen::MatrixXcd> cache;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const int k = g.port_count(v);
    const auto o = static_cast<Eigen::Index>(space.block_offset(v));
    // Hermitian, so an all-zero row block means an all-zero column block too.
    if (m.middleRows(o, k).cwiseAbs().maxCoeff() == 0.0) continue;
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, coin.matrix(k)).first;
    const Eigen::MatrixXcd& c = it->second;
    m.middleRows(o, k) = (c * m.middleRows(o, k)).eval();
    m.middleCols(o, k) = (m.middleCols(o, k) * c.adjoint()).eval();
  }

  const auto d = static_cast<std::size_t>(m.rows());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t ti = space.shift_target(i);
    if (ti == kNoIndex) {
      if (m.row(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff() != 0.0) {
        throw BoundaryOverflow("density reached the end of the line");
      }
      continue;
    }
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t tj = space.shift_target(j);
      if (tj == kNoIndex) continue;
      out(static_cast<Eigen::Index>(ti), static_cast<Eigen::Index>(tj)) =
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return DensityState(rho.space_ptr(), std::move(out));
}

DensityState evolve_density(const DensityState& rho0, const CoinOp& coin,
                            const DecoherenceSpec& spec, int steps,
                            const DensityObserver& observer) {
  validate(spec);
  check_dimension(rho0.space());
  if (steps < 0) throw InvalidArgument("steps must be nonnegative");
  DensityState rho = rho0;
  for (int t = 1; t <= steps; ++t) {
    rho = apply_channel(unitary_step(rho, coin), spec);
    const double drift = std::abs(rho.trace() - Complex(1.0));
    if (drift > 1e-9) {
      throw InvariantViolation("density trace drifted by " + std::to_string(drift) +
                               " at step " + std::to_string(t));
    }
    if (observer) observer(t, rho);
  }
  return rho;
}

namespace {

// Index drawn with probability weights[i] / sum(weights).
std::size_t sample_index(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_nonzero = i;
    acc += weights[i];
    if (u < acc) return i;
  }
  return last_nonzero;
}

}  // namespace

Vertex sample_position(const PureState& s, Rng& rng) {
  const WalkSpace& space = s.space();
  const auto a = s.amplitudes();
  std::vector<double> weights(static_cast<std::size_t>(space.graph().vertex_count()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) weights[space.position_of(i)] += std::norm(a[i]);
  return static_cast<Vertex>(sample_index(weights, rng));
}

namespace {

// Projective measurement of the target; returns the collapsed state and fills
// the outcome fields of the event.
PureState measure(const PureState& s, MeasurementTarget target, Rng& rng, MeasurementEvent& event) {
  const WalkSpace& space = s.space();
  const auto a = s.amplitudes();
  std::vector<Complex> out(a.size());

  auto keep_where = [&](auto&& predicate) {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (predicate(i)) norm2 += std::norm(a[i]);
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (predicate(i)) out[i] = a[i] * scale;
    }
  };

  switch (target) {
    case MeasurementTarget::both: {
      std::vector<double> weights(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) weights[i] = std::norm(a[i]);
      const std::size_t k = sample_index(weights, rng);
      out[k] = a[k] / std::abs(a[k]);
      event.position = space.position_of(k);
      event.coin = space.coin_of(k);
      break;
    }
    case MeasurementTarget::position: {
      const Vertex v = sample_position(s, rng);
      keep_where([&](std::size_t i) { return space.position_of(i) == v; });
      event.position = v;
      break;
    }
    case MeasurementTarget::coin: {
      std::vector<double> weights(static_cast<std::size_t>(space.graph().max_port_count()), 0.0);
      for (std::size_t i = 0; i < a.size(); ++i) weights[space.coin_of(i)] += std::norm(a[i]);
      const int c = static_cast<int>(sample_index(weights, rng));
      keep_where([&](std::size_t i) { return space.coin_of(i) == c; });
      event.coin = c;
      break;
    }
  }
  return PureState(s.space_ptr(), std::move(out));
}

}  // namespace

Trajectory evolve_trajectory(const PureState& s0, const CoinOp& coin, const DecoherenceSpec& spec,
                             int steps, std::uint64_t seed) {
  validate(spec);
  if (steps < 0) throw InvalidArgument("steps must be nonnegative");
  Rng rng(seed);
  Trajectory result{s0, {}};
  result.record.reserve(static_cast<std::size_t>(steps));
  for (int t = 1; t <= steps; ++t) {
    result.state = step(result.state, coin);
    MeasurementEvent event;
    event.step = t;
    event.measured = rng.uniform01() < spec.p;
    if (event.measured) result.state = measure(result.state, spec.target, rng, event);
    result.record.push_back(event);
  }
  return result;
}

std::vector<std::uint64_t> trajectory_histogram(const PureState& s0, const CoinOp& coin,
                                                const DecoherenceSpec& spec, int steps,
                                                std::uint64_t seed, std::uint64_t count,
                                                unsigned threads) {
  constexpr std::uint64_t kReadoutSalt = 0x9e3779b97f4a7c15ULL;
  const auto n = static_cast<std::size_t>(s0.graph().vertex_count());
  threads = std::max(1u, threads);
  std::vector<std::vector<std::uint64_t>> partial(threads, std::vector<std::uint64_t>(n, 0));
  std::vector<std::exception_ptr> errors(threads);

  auto work = [&](unsigned worker) {
    try {
      for (std::uint64_t k = worker; k < count; k += threads) {
        const std::uint64_t trajectory_seed = seed + k;
        Trajectory tr = evolve_trajectory(s0, coin, spec, steps, trajectory_seed);
        Rng readout(trajectory_seed ^ kReadoutSalt);
        ++partial[worker][static_cast<std::size_t>(sample_position(tr.state, readout))];
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

  std::vector<std::uint64_t> histogram(n, 0);
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < n; ++i) histogram[i] += p[i];
  }
  return histogram;
}

void write_measurement_record(std::ostream& out, const Graph& g,
                              const std::vector<MeasurementEvent>& record) {
  out << "step,measured,position,coin\n";
  for (const auto& e : record) {
    out << e.step << ',' << (e.measured ? 1 : 0) << ',';
    if (e.position) out << (g.has_coordinates() ? g.coordinate(*e.position) : *e.position);
    out << ',';
    if (e.coin) out << *e.coin;
    out << '\n';
  }
}

}  // namespace qwalk
