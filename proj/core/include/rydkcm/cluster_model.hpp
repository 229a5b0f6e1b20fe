#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "rydkcm/config.hpp"

namespace rydkcm {

/// Fixed-cluster-number subspace of N two-level atoms. A state is stored as
/// its two-level basis index: site 0 is the most significant bit, so
/// "ggr" = 0b001. States are kept in ascending index order.
struct ReducedBasis {
  int n_sites = 0;
  Boundary boundary = Boundary::open;
  int cluster_count = 0;
  std::vector<std::uint64_t> states;
  std::unordered_map<std::uint64_t, int> index_of;

  std::size_t size() const { return states.size(); }
  /// g/r pattern of state a, e.g. "grr".
  std::string pattern(int a) const;
  /// Index of a g/r (or 0/1) pattern, -1 when it lies outside the subspace.
  int find(std::string_view pattern) const;
};

/// Bit mask (site 0 = most significant bit) of a pattern made of g/r or 0/1.
std::uint64_t pattern_to_state(std::string_view pattern);
std::string state_to_pattern(std::uint64_t state, int n_sites);

/// Number of maximal runs of Rydberg sites. On a ring an all-Rydberg chain
/// has no cluster edge and counts as zero clusters.
int cluster_count(std::uint64_t state, int n_sites, Boundary boundary);

/// All states with the cluster count of `initial`. Throws ArgumentError for
/// an initial state without clusters and DimensionError above 62 sites.
ReducedBasis enumerate_subspace(int n_sites, std::string_view initial, Boundary boundary = Boundary::open);

struct ReducedHamiltonian {
  ReducedBasis basis;
  Eigen::MatrixXd matrix;  // real symmetric
  double coupling = 0.0;   // J = omega_r / 2
  double diagonal_offset = 0.0;
};

/// Entry (a, b) = omega_r/2 when a and b differ on exactly one site; the
/// diagonal is `diagonal_offset`.
ReducedHamiltonian build_reduced_hamiltonian(const ReducedBasis& basis, double omega_r,
                                             double diagonal_offset = 0.0);

/// Ascending eigenvalues.
Eigen::VectorXd spectrum(const ReducedHamiltonian& h);

struct DarkStates {
  int count = 0;
  Eigen::MatrixXd vectors;  // orthonormal columns spanning the kernel
};

/// Kernel of the reduced Hamiltonian (|E - offset| < tolerance).
DarkStates dark_states(const ReducedHamiltonian& h, double tolerance = 1e-10);

/// Alternating-sign sum over single-excitation states, normalized. Empty when
/// the basis has no single-excitation states.
Eigen::VectorXd alternating_single_excitation(const ReducedBasis& basis);

/// epsilon = -2J (cos(2 pi m1/N) + cos(2 pi m2/N)).
double tight_binding_dispersion(double m1, double m2, int n_sites, double coupling);

struct ReducedEvolution {
  std::vector<double> times;
  Eigen::VectorXd concentration;  // r(t)
  Eigen::MatrixXd populations;    // rows: times, cols: sites
};

/// Exact unitary evolution inside the subspace by eigendecomposition.
ReducedEvolution evolve_reduced(const ReducedHamiltonian& h, const Eigen::VectorXcd& psi0,
                                const std::vector<double>& t_grid);
ReducedEvolution evolve_reduced(const ReducedHamiltonian& h, std::string_view initial,
                                const std::vector<double>& t_grid);

struct FullEvolution {
  std::vector<double> times;
  Eigen::VectorXd concentration;
  Eigen::MatrixXd populations;
  Eigen::VectorXd leakage;  // probability outside `subspace` (when given)
};

/// Exact evolution of the coherent two-level chain (omega_e ignored) from a
/// g/r product state. When `subspace` is non-null, also reports the weight
/// outside it.
FullEvolution evolve_full_two_level(const SystemConfig& config, std::string_view initial,
                                    const std::vector<double>& t_grid, const ReducedBasis* subspace = nullptr);

/// Oscillation period of a uniformly sampled series: lag of the first
/// maximum of its autocorrelation after the first zero crossing, refined by
/// parabolic interpolation. Throws InsufficientDataError when no full
/// period is visible.
double oscillation_period(const std::vector<double>& times, const Eigen::VectorXd& series);

}  // namespace rydkcm
