#include "qwalk/continuous_walk.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "qwalk/errors.hpp"

namespace qwalk {

std::string to_string(HamiltonianConvention convention) {
  return convention == HamiltonianConvention::laplacian ? "laplacian" : "adjacency";
}

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("hopping rate gamma must be positive, got " + std::to_string(gamma));
  }
}

}  // namespace

Hamiltonian hamiltonian(const Graph& g, double gamma, HamiltonianConvention convention) {
  check_gamma(gamma);
  const int n = g.vertex_count();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [u, v] : g.edges()) {
    h(u, v) = -gamma;
    h(v, u) = -gamma;
  }
  if (convention == HamiltonianConvention::laplacian) {
    for (Vertex v = 0; v < n; ++v) h(v, v) = gamma * g.degree(v);
  }
  return {std::move(h), gamma, convention};
}

Propagator::Propagator(const Hamiltonian& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix);
  if (solver.info() != Eigen::Success) throw InvariantViolation("eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

Eigen::VectorXcd Propagator::evolve(const Eigen::VectorXcd& initial, double time) const {
  if (time < 0.0) throw InvalidArgument("evolution time must be nonnegative");
  if (initial.size() != eigenvalues_.size()) throw InvalidArgument("initial state has the wrong dimension");
  if (std::abs(initial.norm() - 1.0) > 1e-10) throw InvalidArgument("initial state is not normalized");
  Eigen::VectorXcd coefficients = eigenvectors_.transpose().cast<std::complex<double>>() * initial;
  for (Eigen::Index k = 0; k < coefficients.size(); ++k) {
    coefficients[k] *= std::polar(1.0, -eigenvalues_[k] * time);
  }
  return eigenvectors_.cast<std::complex<double>>() * coefficients;
}

Eigen::VectorXcd evolve_ct(const Hamiltonian& h, const Eigen::VectorXcd& initial, double time) {
  if (time < 0.0) throw InvalidArgument("evolution time must be nonnegative");
  return Propagator(h).evolve(initial, time);
}

Eigen::VectorXcd vertex_state(int dimension, Vertex v) {
  if (v < 0 || v >= dimension) throw InvalidArgument("vertex out of range");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dimension);
  psi[v] = 1.0;
  return psi;
}

Hamiltonian reduce_columns(int depth, const GlueSpec& glue, double gamma,
                           HamiltonianConvention convention) {
  check_gamma(gamma);
  if (depth < 1) throw InvalidArgument("glued trees need depth >= 1");
  const int columns = 2 * depth + 2;
  const int glue_degree = glue.mode == GlueMode::symmetric ? 1 : 2;
  auto level = [&](int c) { return std::min(c, 2 * depth + 1 - c); };
  auto size = [&](int c) { return std::ldexp(1.0, level(c)); };

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(columns, columns);
  for (int c = 0; c + 1 < columns; ++c) {
    // Edges between column c and c + 1.
    double edges;
    if (c < depth) {
      edges = size(c + 1);
    } else if (c == depth) {
      edges = glue_degree * size(c);
    } else {
      edges = size(c);
    }
    const double hop = -gamma * edges / std::sqrt(size(c) * size(c + 1));
    h(c, c + 1) = hop;
    h(c + 1, c) = hop;
  }
  if (convention == HamiltonianConvention::laplacian) {
    for (int c = 0; c < columns; ++c) {
      int degree;
      if (level(c) == 0) {
        degree = 2;
      } else if (level(c) < depth) {
        degree = 3;
      } else {
        degree = 1 + glue_degree;
      }
      h(c, c) = gamma * degree;
    }
  }
  return {std::move(h), gamma, convention};
}

std::vector<double> column_probabilities(const Graph& g, const Eigen::VectorXcd& amplitudes) {
  if (g.labels().empty()) throw InvalidArgument("graph has no column labels");
  if (amplitudes.size() != g.vertex_count()) throw InvalidArgument("amplitude vector has the wrong dimension");
  std::vector<double> out(static_cast<std::size_t>(g.column_count()), 0.0);
  for (Vertex v = 0; v < g.vertex_count(); ++v) out[g.labels()[v]] += std::norm(amplitudes[v]);
  return out;
}

std::vector<ExitSample> exit_probability_series(int depth, const GlueSpec& glue, double gamma,
                                                double t_end, double dt,
                                                HamiltonianConvention convention) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (t_end < 0.0) throw InvalidArgument("end time must be nonnegative");
  const Hamiltonian h = reduce_columns(depth, glue, gamma, convention);
  const Propagator propagator(h);
  const int columns = static_cast<int>(h.matrix.rows());
  const Eigen::VectorXcd entrance = vertex_state(columns, 0);

  std::vector<ExitSample> series;
  const auto count = static_cast<long>(std::floor(t_end / dt + 1e-9));
  series.reserve(static_cast<std::size_t>(count) + 1);
  for (long k = 0; k <= count; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Eigen::VectorXcd psi = propagator.evolve(entrance, t);
    series.push_back({t, std::norm(psi[columns - 1])});
  }
  return series;
}

ExitPeak find_exit_peak(const std::vector<ExitSample>& series) {
  ExitPeak peak;
  if (series.empty()) return peak;
  for (const auto& s : series) {
    if (s.exit_probability > peak.max_probability) {
      peak.max_probability = s.exit_probability;
      peak.max_time = s.time;
    }
  }
  const double half = 0.5 * peak.max_probability;
  bool threshold_found = false;
  bool peak_found = false;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double p = series[i].exit_probability;
    if (!threshold_found && p >= half) {
      peak.threshold_time = series[i].time;
      threshold_found = true;
    }
    const bool rises = i == 0 || p >= series[i - 1].exit_probability;
    const bool falls = i + 1 == series.size() || p >= series[i + 1].exit_probability;
    if (!peak_found && rises && falls && p >= half && p > 0.0) {
      peak.first_peak_time = series[i].time;
      peak.first_peak_probability = p;
      peak_found = true;
    }
  }
  return peak;
}

void write_exit_series(std::ostream& out, const std::vector<ExitSample>& series) {
  out << "time,exit_probability\n";
  char buffer[64];
  for (const auto& s : series) {
    std::snprintf(buffer, sizeof buffer, "%.15g,%.15g\n", s.time, s.exit_probability);
    out << buffer;
  }
}

}  // namespace qwalk
