#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rydkcm/config.hpp"
#include "rydkcm/hamiltonian.hpp"

namespace rydkcm {

struct MeOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 1e-2;
  double max_step = 1.0;
  // Output points at which the minimum eigenvalue is checked; 0 checks every
  // point when the dimension is at most 81 and 25 evenly spaced points otherwise.
  int eigen_checks = 0;
  bool keep_states = false;
  int max_sites_three_level = 5;
  int max_sites_two_level = 10;
};

struct MeResult {
  std::vector<double> times;
  Eigen::MatrixXd rydberg;  // rows: output times, cols: sites
  std::vector<Eigen::MatrixXcd> states;  // filled when keep_states is set
  Eigen::MatrixXcd final_state;
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 1.0;
  long steps_accepted = 0;
  long steps_rejected = 0;
};

Eigen::MatrixXcd pure_density(const Eigen::VectorXcd& psi);

/// n_samples evenly spaced points on [0, t_max].
std::vector<double> uniform_grid(double t_max, int n_samples);

/// Lindblad evolution with jump operators |g><e|_i at rate gamma_e. In the
/// two-level mode the evolution is unitary and computed by diagonalization.
/// Throws IntegratorError when trace or positivity drift beyond 1e-8.
MeResult evolve_master_equation(const SystemConfig& config, const Eigen::MatrixXcd& rho0,
                                const std::vector<double>& t_grid,
                                HamiltonianMode mode = HamiltonianMode::three_level, const MeOptions& options = {});

/// Exact unitary evolution of a pure state under a Hermitian Hamiltonian.
/// Returns one state per grid point.
std::vector<Eigen::VectorXcd> evolve_unitary(const ManyBodyHamiltonian& h, const Eigen::VectorXcd& psi0,
                                             const std::vector<double>& t_grid);

}  // namespace rydkcm
