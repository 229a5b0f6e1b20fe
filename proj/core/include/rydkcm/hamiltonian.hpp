#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rydkcm/config.hpp"

namespace rydkcm {

using cplx = std::complex<double>;

enum class HamiltonianMode { three_level, two_level_coherent };

inline constexpr std::size_t kThreeLevelCap = 531441;  // 3^12
inline constexpr std::size_t kTwoLevelCap = 1u << 20;

/// Pairwise Rydberg-Rydberg coupling between sites i < j. Periodic wrap-around
/// pairs that coincide (e.g. N = 2) are merged and their strengths summed.
struct Bond {
  int i;
  int j;
  double strength;
};

/// Interaction strength at distance x (x >= 1) for the configured potential.
double pair_potential(const SystemConfig& config, int x);
std::vector<Bond> interaction_bonds(const SystemConfig& config);

/// Total interaction energy of a Rydberg bit mask (bit i = site i).
double interaction_energy(std::uint64_t rydberg_mask, const std::vector<Bond>& bonds);

struct ManyBodyHamiltonian {
  int n_sites = 0;
  HamiltonianMode mode = HamiltonianMode::three_level;
  Eigen::SparseMatrix<cplx, Eigen::RowMajor> matrix;

  Eigen::Index dimension() const { return matrix.rows(); }
};

std::size_t hilbert_dimension(int n_sites, HamiltonianMode mode);

/// Hermitian many-body Hamiltonian. Basis: site-major product states, site 0
/// the slowest index, local levels g=0, e=1, r=2 (two-level: g=0, r=1).
/// max_dimension = 0 selects kThreeLevelCap / kTwoLevelCap.
ManyBodyHamiltonian build_hamiltonian(const SystemConfig& config, HamiltonianMode mode,
                                      std::size_t max_dimension = 0);

/// H - (i gamma_e / 2) sum_i |e><e|_i (the two-level mode has no |e>).
Eigen::SparseMatrix<cplx, Eigen::RowMajor> effective_hamiltonian(const ManyBodyHamiltonian& h, double gamma_e);

/// Local level of `site` in basis state `index`.
int local_level(std::size_t index, int site, int n_sites, HamiltonianMode mode);
std::size_t basis_index(const std::vector<AtomLevel>& levels, HamiltonianMode mode);

/// Product state from a g/e/r pattern (two-level mode accepts only g and r).
Eigen::VectorXcd product_state(std::string_view pattern, HamiltonianMode mode);

/// Per-site Rydberg populations of a state vector.
Eigen::VectorXd rydberg_populations(const Eigen::VectorXcd& psi, int n_sites, HamiltonianMode mode);

}  // namespace rydkcm
