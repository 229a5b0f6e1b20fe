#include "rydkcm/hamiltonian.hpp"

#include <cmath>
#include <map>

#include "rydkcm/errors.hpp"

namespace rydkcm {

namespace {

int local_dim(HamiltonianMode mode) { return mode == HamiltonianMode::three_level ? 3 : 2; }

int rydberg_level(HamiltonianMode mode) { return mode == HamiltonianMode::three_level ? 2 : 1; }

std::vector<std::size_t> strides(int n, HamiltonianMode mode) {
  std::vector<std::size_t> s(static_cast<std::size_t>(n));
  std::size_t stride = 1;
  for (int i = n - 1; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = stride;
    stride *= static_cast<std::size_t>(local_dim(mode));
  }
  return s;
}

}  // namespace

double pair_potential(const SystemConfig& c, int x) {
  if (x < 1) throw ArgumentError("pair distance must be >= 1");
  switch (c.potential) {
    case Potential::nearest_neighbor: return x == 1 ? c.interaction_strength : 0.0;
    case Potential::van_der_waals: return c.interaction_strength / std::pow(static_cast<double>(x), 6);
    case Potential::dipolar: return c.interaction_strength / std::pow(static_cast<double>(x), 3);
  }
  return 0.0;
}

std::vector<Bond> interaction_bonds(const SystemConfig& c) {
  const int n = c.n_sites;
  const int cutoff = c.effective_cutoff();
  std::map<std::pair<int, int>, double> merged;
  for (int i = 0; i < n; ++i) {
    for (int x = 1; x <= cutoff; ++x) {
      int j = i + x;
      if (c.boundary == Boundary::open) {
        if (j >= n) break;
      } else {
        j %= n;
        if (j == i) continue;
      }
      const double v = pair_potential(c, x);
      if (v == 0.0) continue;
      merged[{std::min(i, j), std::max(i, j)}] += v;
    }
  }
  std::vector<Bond> bonds;
  for (const auto& [key, v] : merged) bonds.push_back({key.first, key.second, v});
  return bonds;
}

double interaction_energy(std::uint64_t mask, const std::vector<Bond>& bonds) {
  double e = 0.0;
  for (const Bond& b : bonds) {
    if (((mask >> b.i) & 1u) && ((mask >> b.j) & 1u)) e += b.strength;
  }
  return e;
}

std::size_t hilbert_dimension(int n_sites, HamiltonianMode mode) {
  std::size_t dim = 1;
  for (int i = 0; i < n_sites; ++i) {
    if (dim > (std::size_t{1} << 40)) return dim;  // saturate well above any cap
    dim *= static_cast<std::size_t>(local_dim(mode));
  }
  return dim;
}

int local_level(std::size_t index, int site, int n_sites, HamiltonianMode mode) {
  const auto d = static_cast<std::size_t>(local_dim(mode));
  for (int i = n_sites - 1; i > site; --i) index /= d;
  return static_cast<int>(index % d);
}

std::size_t basis_index(const std::vector<AtomLevel>& levels, HamiltonianMode mode) {
  std::size_t idx = 0;
  for (AtomLevel l : levels) {
    int v = static_cast<int>(l);
    if (mode == HamiltonianMode::two_level_coherent) {
      if (l == AtomLevel::e) throw ArgumentError("two-level basis has no |e> state");
      v = l == AtomLevel::r ? 1 : 0;
    }
    idx = idx * static_cast<std::size_t>(local_dim(mode)) + static_cast<std::size_t>(v);
  }
  return idx;
}

ManyBodyHamiltonian build_hamiltonian(const SystemConfig& c, HamiltonianMode mode, std::size_t max_dimension) {
  validate(c);
  const std::size_t cap =
      max_dimension ? max_dimension : (mode == HamiltonianMode::three_level ? kThreeLevelCap : kTwoLevelCap);
  const std::size_t dim = hilbert_dimension(c.n_sites, mode);
  if (dim > cap) {
    throw DimensionError("Hilbert space dimension " + std::to_string(dim) + " exceeds cap " + std::to_string(cap));
  }
  const int n = c.n_sites;
  const auto st = strides(n, mode);
  const auto bonds = interaction_bonds(c);
  const int rl = rydberg_level(mode);

  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(dim * static_cast<std::size_t>(1 + 2 * n));
  std::vector<int> lev(static_cast<std::size_t>(n));
  for (std::size_t a = 0; a < dim; ++a) {
    std::size_t rem = a;
    std::uint64_t mask = 0;
    for (int i = n - 1; i >= 0; --i) {
      lev[static_cast<std::size_t>(i)] = static_cast<int>(rem % static_cast<std::size_t>(local_dim(mode)));
      rem /= static_cast<std::size_t>(local_dim(mode));
      if (lev[static_cast<std::size_t>(i)] == rl) mask |= std::uint64_t{1} << i;
    }
    double diag = interaction_energy(mask, bonds);
    for (int i = 0; i < n; ++i) {
      const auto si = static_cast<std::size_t>(i);
      if (lev[si] == rl) diag -= c.delta_r + c.site_detuning(i);
      if (lev[si] != 0) continue;
      // Couplings out of |g>_i; the Hermitian partner is added from the other side.
      const std::size_t to_r = a + static_cast<std::size_t>(rl) * st[si];
      if (c.omega_r != 0.0) {
        trip.emplace_back(a, to_r, c.omega_r / 2);
        trip.emplace_back(to_r, a, c.omega_r / 2);
      }
      if (mode == HamiltonianMode::three_level && c.omega_e != 0.0) {
        const std::size_t to_e = a + st[si];
        trip.emplace_back(a, to_e, c.omega_e / 2);
        trip.emplace_back(to_e, a, c.omega_e / 2);
      }
    }
    if (diag != 0.0) trip.emplace_back(a, a, diag);
  }
  ManyBodyHamiltonian h;
  h.n_sites = n;
  h.mode = mode;
  h.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  h.matrix.setFromTriplets(trip.begin(), trip.end());
  h.matrix.makeCompressed();
  return h;
}

Eigen::SparseMatrix<cplx, Eigen::RowMajor> effective_hamiltonian(const ManyBodyHamiltonian& h, double gamma_e) {
  Eigen::SparseMatrix<cplx, Eigen::RowMajor> heff = h.matrix;
  if (h.mode == HamiltonianMode::two_level_coherent) return heff;
  const auto dim = static_cast<std::size_t>(h.dimension());
  std::vector<Eigen::Triplet<cplx>> trip;
  for (std::size_t a = 0; a < dim; ++a) {
    int n_e = 0;
    for (int i = 0; i < h.n_sites; ++i) n_e += local_level(a, i, h.n_sites, h.mode) == 1;
    if (n_e) trip.emplace_back(a, a, cplx(0.0, -gamma_e / 2 * n_e));
  }
  Eigen::SparseMatrix<cplx, Eigen::RowMajor> damp(h.dimension(), h.dimension());
  damp.setFromTriplets(trip.begin(), trip.end());
  heff += damp;
  heff.makeCompressed();
  return heff;
}

Eigen::VectorXcd product_state(std::string_view pattern, HamiltonianMode mode) {
  const auto levels = parse_pattern(pattern);
  const std::size_t dim = hilbert_dimension(static_cast<int>(levels.size()), mode);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  psi(static_cast<Eigen::Index>(basis_index(levels, mode))) = 1.0;
  return psi;
}

Eigen::VectorXd rydberg_populations(const Eigen::VectorXcd& psi, int n, HamiltonianMode mode) {
  const int rl = rydberg_level(mode);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  for (Eigen::Index a = 0; a < psi.size(); ++a) {
    const double p = std::norm(psi(a));
    if (p == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      if (local_level(static_cast<std::size_t>(a), i, n, mode) == rl) r(i) += p;
    }
  }
  return r;
}

}  // namespace rydkcm
