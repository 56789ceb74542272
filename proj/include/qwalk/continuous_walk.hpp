#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/graph.hpp"

namespace qwalk {

enum class HamiltonianConvention {
  laplacian,  // H = gamma (D - A)
  adjacency,  // H = -gamma A
};

std::string to_string(HamiltonianConvention convention);

struct Hamiltonian {
  Eigen::MatrixXd matrix;
  double gamma = 1.0;
  HamiltonianConvention convention = HamiltonianConvention::laplacian;
};

Hamiltonian hamiltonian(const Graph& g, double gamma,
                        HamiltonianConvention convention = HamiltonianConvention::laplacian);

// exp(-i H t) through one dense symmetric eigendecomposition, reusable across
// times and initial states.
class Propagator {
 public:
  explicit Propagator(const Hamiltonian& h);

  Eigen::VectorXcd evolve(const Eigen::VectorXcd& initial, double time) const;
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

// Requires a normalized initial vector and time >= 0.
Eigen::VectorXcd evolve_ct(const Hamiltonian& h, const Eigen::VectorXcd& initial, double time);

// Unit vector on one vertex.
Eigen::VectorXcd vertex_state(int dimension, Vertex v);

// Hamiltonian of the glued-trees walk restricted to column-uniform states,
// |col c> = sum_{v in c} |v> / sqrt(N_c). Every vertex in a column has the same
// number of neighbours in each adjacent column for both glue modes, so this
// (2 depth + 2)-dimensional chain is an invariant subspace that contains the
// entrance state. Built analytically; never materializes the full graph.
Hamiltonian reduce_columns(int depth, const GlueSpec& glue, double gamma,
                           HamiltonianConvention convention = HamiltonianConvention::laplacian);

// Probability per column of a full-graph amplitude vector.
std::vector<double> column_probabilities(const Graph& g, const Eigen::VectorXcd& amplitudes);

struct ExitSample {
  double time = 0.0;
  double exit_probability = 0.0;
};

// Exit probability on the uniform grid 0, dt, 2 dt, ... up to t_end, starting
// from the entrance, computed on the column chain.
std::vector<ExitSample> exit_probability_series(int depth, const GlueSpec& glue, double gamma,
                                                double t_end, double dt,
                                                HamiltonianConvention convention =
                                                    HamiltonianConvention::laplacian);

struct ExitPeak {
  double max_probability = 0.0;  // over the whole series
  double max_time = 0.0;
  // First local maximum that reaches half the series maximum.
  double first_peak_time = 0.0;
  double first_peak_probability = 0.0;
  // First sample at or above half the series maximum.
  double threshold_time = 0.0;
};

ExitPeak find_exit_peak(const std::vector<ExitSample>& series);

// CSV with header "time,exit_probability".
void write_exit_series(std::ostream& out, const std::vector<ExitSample>& series);

}  // namespace qwalk
