#include "rydkcm/cluster_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "rydkcm/errors.hpp"
#include "rydkcm/hamiltonian.hpp"
#include "rydkcm/master_equation.hpp"

namespace rydkcm {

namespace {

constexpr int kMaxReducedSites = 62;
constexpr int kFilterSites = 20;  // above this, enumerate constructively

bool site_bit(std::uint64_t state, int site, int n) { return (state >> (n - 1 - site)) & 1u; }

// Appends every state whose cluster count is `k`, built site by site.
void enumerate_runs(int n, int k, Boundary boundary, std::vector<std::uint64_t>& out) {
  struct Frame {
    int site;
    std::uint64_t state;
    int runs;  // runs opened so far (linear count)
  };
  std::vector<Frame> stack{{0, 0, 0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.site == n) {
      if (cluster_count(f.state, n, boundary) == k) out.push_back(f.state);
      continue;
    }
    // A ring can merge the first and last run, so allow one extra run.
    const int limit = boundary == Boundary::periodic ? k + 1 : k;
    const bool prev = f.site > 0 && site_bit(f.state, f.site - 1, n);
    stack.push_back({f.site + 1, f.state, f.runs});
    const int runs = f.runs + (prev ? 0 : 1);
    if (runs <= limit) stack.push_back({f.site + 1, f.state | (std::uint64_t{1} << (n - 1 - f.site)), runs});
  }
}

}  // namespace

std::uint64_t pattern_to_state(std::string_view pattern) {
  if (pattern.size() > static_cast<std::size_t>(kMaxReducedSites)) {
    throw DimensionError("reduced model supports at most " + std::to_string(kMaxReducedSites) + " sites");
  }
  std::uint64_t s = 0;
  for (char c : pattern) {
    s <<= 1;
    if (c == 'r' || c == '1') {
      s |= 1u;
    } else if (c != 'g' && c != '0') {
      throw ArgumentError(std::string("pattern character '") + c + "' is not one of g, r, 0, 1");
    }
  }
  return s;
}

std::string state_to_pattern(std::uint64_t state, int n_sites) {
  std::string p(static_cast<std::size_t>(n_sites), 'g');
  for (int i = 0; i < n_sites; ++i) {
    if (site_bit(state, i, n_sites)) p[static_cast<std::size_t>(i)] = 'r';
  }
  return p;
}

std::string ReducedBasis::pattern(int a) const { return state_to_pattern(states.at(static_cast<std::size_t>(a)), n_sites); }

int ReducedBasis::find(std::string_view p) const {
  if (static_cast<int>(p.size()) != n_sites) return -1;
  const auto it = index_of.find(pattern_to_state(p));
  return it == index_of.end() ? -1 : it->second;
}

int cluster_count(std::uint64_t state, int n_sites, Boundary boundary) {
  int excited = 0, pairs = 0;
  for (int i = 0; i < n_sites; ++i) {
    if (!site_bit(state, i, n_sites)) continue;
    ++excited;
    if (i + 1 < n_sites && site_bit(state, i + 1, n_sites)) ++pairs;
  }
  if (boundary == Boundary::periodic && n_sites > 2 && site_bit(state, 0, n_sites) &&
      site_bit(state, n_sites - 1, n_sites)) {
    ++pairs;
  }
  return excited - pairs;
}

ReducedBasis enumerate_subspace(int n_sites, std::string_view initial, Boundary boundary) {
  if (n_sites < 1) throw ArgumentError("n_sites must be positive");
  if (n_sites > kMaxReducedSites) {
    throw DimensionError("reduced model supports at most " + std::to_string(kMaxReducedSites) + " sites");
  }
  if (static_cast<int>(initial.size()) != n_sites) throw ArgumentError("initial pattern length differs from n_sites");
  const std::uint64_t init = pattern_to_state(initial);
  const int k = cluster_count(init, n_sites, boundary);
  if (k == 0) throw ArgumentError("initial state has no Rydberg cluster; the subspace is the single state");

  ReducedBasis b;
  b.n_sites = n_sites;
  b.boundary = boundary;
  b.cluster_count = k;
  if (n_sites <= kFilterSites) {
    const std::uint64_t dim = std::uint64_t{1} << n_sites;
    for (std::uint64_t s = 0; s < dim; ++s) {
      if (cluster_count(s, n_sites, boundary) == k) b.states.push_back(s);
    }
  } else {
    enumerate_runs(n_sites, k, boundary, b.states);
    std::sort(b.states.begin(), b.states.end());
  }
  b.index_of.reserve(b.states.size());
  for (std::size_t a = 0; a < b.states.size(); ++a) b.index_of.emplace(b.states[a], static_cast<int>(a));
  return b;
}

ReducedHamiltonian build_reduced_hamiltonian(const ReducedBasis& basis, double omega_r, double diagonal_offset) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  ReducedHamiltonian h;
  h.basis = basis;
  h.coupling = omega_r / 2;
  h.diagonal_offset = diagonal_offset;
  h.matrix = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    h.matrix(a, a) = diagonal_offset;
    const std::uint64_t s = basis.states[static_cast<std::size_t>(a)];
    for (int i = 0; i < basis.n_sites; ++i) {
      const auto it = basis.index_of.find(s ^ (std::uint64_t{1} << i));
      if (it != basis.index_of.end()) h.matrix(a, it->second) = h.coupling;
    }
  }
  return h;
}

Eigen::VectorXd spectrum(const ReducedHamiltonian& h) {
  if (h.matrix.rows() == 0) throw ArgumentError("empty reduced Hamiltonian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

DarkStates dark_states(const ReducedHamiltonian& h, double tolerance) {
  if (h.matrix.rows() == 0) throw ArgumentError("empty reduced Hamiltonian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    if (std::abs(es.eigenvalues()(k) - h.diagonal_offset) < tolerance) cols.push_back(k);
  }
  DarkStates d;
  d.count = static_cast<int>(cols.size());
  d.vectors.resize(h.matrix.rows(), d.count);
  for (int c = 0; c < d.count; ++c) d.vectors.col(c) = es.eigenvectors().col(cols[static_cast<std::size_t>(c)]);
  return d;
}

Eigen::VectorXd alternating_single_excitation(const ReducedBasis& basis) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  int found = 0;
  for (int i = 0; i < basis.n_sites; ++i) {
    const auto it = basis.index_of.find(std::uint64_t{1} << (basis.n_sites - 1 - i));
    if (it == basis.index_of.end()) continue;
    v(it->second) = (i % 2 == 0) ? 1.0 : -1.0;
    ++found;
  }
  if (found == 0) return {};
  return v.normalized();
}

double tight_binding_dispersion(double m1, double m2, int n_sites, double coupling) {
  if (n_sites < 1) throw ArgumentError("n_sites must be positive");
  const double half = n_sites / 2.0;
  if (std::abs(m1) > half || std::abs(m2) > half) throw ArgumentError("quasi-momentum index outside [-N/2, N/2]");
  const double k = 2 * std::numbers::pi / n_sites;
  return -2 * coupling * (std::cos(k * m1) + std::cos(k * m2));
}

ReducedEvolution evolve_reduced(const ReducedHamiltonian& h, const Eigen::VectorXcd& psi0,
                                const std::vector<double>& t_grid) {
  const Eigen::Index dim = h.matrix.rows();
  if (psi0.size() != dim) throw ArgumentError("initial state is not supported on the reduced basis");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix);
  const Eigen::MatrixXcd vecs = es.eigenvectors().cast<cplx>();
  const Eigen::VectorXcd coeff = vecs.adjoint() * psi0;
  const int n = h.basis.n_sites;

  ReducedEvolution out;
  out.times = t_grid;
  out.concentration.resize(static_cast<Eigen::Index>(t_grid.size()));
  out.populations = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(t_grid.size()), n);
  Eigen::VectorXcd phased(dim);
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    for (Eigen::Index m = 0; m < dim; ++m) phased(m) = coeff(m) * std::polar(1.0, -es.eigenvalues()(m) * t_grid[k]);
    const Eigen::VectorXcd psi = vecs * phased;
    const auto row = static_cast<Eigen::Index>(k);
    for (Eigen::Index a = 0; a < dim; ++a) {
      const double w = std::norm(psi(a));
      const std::uint64_t s = h.basis.states[static_cast<std::size_t>(a)];
      for (int i = 0; i < n; ++i) {
        if (site_bit(s, i, n)) out.populations(row, i) += w;
      }
    }
    out.concentration(row) = out.populations.row(row).sum() / n;
  }
  return out;
}

ReducedEvolution evolve_reduced(const ReducedHamiltonian& h, std::string_view initial,
                                const std::vector<double>& t_grid) {
  const int a = h.basis.find(initial);
  if (a < 0) throw ArgumentError("initial pattern lies outside the reduced subspace");
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(h.matrix.rows());
  psi0(a) = 1.0;
  return evolve_reduced(h, psi0, t_grid);
}

FullEvolution evolve_full_two_level(const SystemConfig& config, std::string_view initial,
                                    const std::vector<double>& t_grid, const ReducedBasis* subspace) {
  const ManyBodyHamiltonian h = build_hamiltonian(config, HamiltonianMode::two_level_coherent);
  const Eigen::VectorXcd psi0 = product_state(initial, HamiltonianMode::two_level_coherent);
  const auto states = evolve_unitary(h, psi0, t_grid);
  const int n = config.n_sites;
  FullEvolution out;
  out.times = t_grid;
  out.populations.resize(static_cast<Eigen::Index>(t_grid.size()), n);
  out.concentration.resize(static_cast<Eigen::Index>(t_grid.size()));
  out.leakage = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(t_grid.size()));
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    out.populations.row(row) = rydberg_populations(states[k], n, HamiltonianMode::two_level_coherent).transpose();
    out.concentration(row) = out.populations.row(row).sum() / n;
    if (subspace) {
      double inside = 0.0;
      for (std::uint64_t s : subspace->states) inside += std::norm(states[k](static_cast<Eigen::Index>(s)));
      out.leakage(row) = std::max(0.0, 1.0 - inside);
    }
  }
  return out;
}

double oscillation_period(const std::vector<double>& times, const Eigen::VectorXd& series) {
  const auto n = static_cast<Eigen::Index>(times.size());
  if (series.size() != n || n < 8) throw InsufficientDataError("series too short for a period estimate");
  const double dt = times[1] - times[0];
  for (Eigen::Index k = 1; k < n; ++k) {
    if (std::abs((times[static_cast<std::size_t>(k)] - times[static_cast<std::size_t>(k - 1)]) - dt) > 1e-9 * std::abs(dt) + 1e-12) {
      throw ArgumentError("oscillation_period needs a uniform grid");
    }
  }
  const Eigen::VectorXd x = series.array() - series.mean();
  const Eigen::Index max_lag = n / 2;
  Eigen::VectorXd ac(max_lag + 1);
  for (Eigen::Index lag = 0; lag <= max_lag; ++lag) {
    ac(lag) = x.head(n - lag).dot(x.tail(n - lag)) / static_cast<double>(n - lag);
  }
  if (!(ac(0) > 0.0)) throw InsufficientDataError("series is constant");
  Eigen::Index lag = 1;
  while (lag <= max_lag && ac(lag) > 0.0) ++lag;
  for (; lag < max_lag; ++lag) {
    if (ac(lag) > 0.0 && ac(lag) >= ac(lag - 1) && ac(lag) > ac(lag + 1)) {
      const double a = ac(lag - 1), b = ac(lag), c = ac(lag + 1);
      const double denom = a - 2 * b + c;
      const double shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
      return (static_cast<double>(lag) + shift) * dt;
    }
  }
  throw InsufficientDataError("no full oscillation period in the series");
}

}  // namespace rydkcm
