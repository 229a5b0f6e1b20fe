#include "rydkcm/master_equation.hpp"

#include <algorithm>
#include <cmath>

#include "rydkcm/errors.hpp"

namespace rydkcm {

namespace {

constexpr cplx kI{0.0, 1.0};

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Liouvillian {
  Eigen::SparseMatrix<cplx, Eigen::RowMajor> heff;
  double gamma = 1.0;
  // For each site, basis indices a with |g>_i together with the index of |e>_i.
  std::vector<std::vector<std::pair<Eigen::Index, Eigen::Index>>> jumps;

  void apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
    const Eigen::MatrixXcd k = heff * rho;
    out = -kI * k + kI * k.adjoint();
    for (const auto& pairs : jumps) {
      for (const auto& [a, ae] : pairs) {
        for (const auto& [b, be] : pairs) out(a, b) += gamma * rho(ae, be);
      }
    }
  }
};

double hermitian_min_eigenvalue(const Eigen::MatrixXcd& rho) {
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

void check_grid(const std::vector<double>& t) {
  if (t.empty()) throw ArgumentError("time grid is empty");
  if (t.front() < 0.0) throw ArgumentError("time grid must start at t >= 0");
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (!(t[k] > t[k - 1])) throw ArgumentError("time grid must be strictly increasing");
  }
}

Eigen::VectorXd diagonal_rydberg(const Eigen::MatrixXcd& rho, int n, HamiltonianMode mode) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  const int rl = mode == HamiltonianMode::three_level ? 2 : 1;
  for (Eigen::Index a = 0; a < rho.rows(); ++a) {
    const double p = rho(a, a).real();
    for (int i = 0; i < n; ++i) {
      if (local_level(static_cast<std::size_t>(a), i, n, mode) == rl) r(i) += p;
    }
  }
  return r;
}

MeResult evolve_two_level(const SystemConfig& c, const Eigen::MatrixXcd& rho0, const std::vector<double>& grid,
                          const MeOptions& opt) {
  const auto h = build_hamiltonian(c, HamiltonianMode::two_level_coherent);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> mix(0.5 * (rho0 + rho0.adjoint()));
  MeResult res;
  res.times = grid;
  res.rydberg = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.size()), c.n_sites);
  std::vector<std::vector<Eigen::VectorXcd>> paths;
  std::vector<double> weights;
  for (Eigen::Index k = 0; k < mix.eigenvalues().size(); ++k) {
    if (mix.eigenvalues()(k) < 1e-14) continue;
    weights.push_back(mix.eigenvalues()(k));
    paths.push_back(evolve_unitary(h, mix.eigenvectors().col(k), grid));
  }
  for (std::size_t t = 0; t < grid.size(); ++t) {
    Eigen::MatrixXcd rho;
    if (opt.keep_states || t + 1 == grid.size()) rho = Eigen::MatrixXcd::Zero(h.dimension(), h.dimension());
    double trace = 0.0;
    for (std::size_t k = 0; k < paths.size(); ++k) {
      const auto& psi = paths[k][t];
      res.rydberg.row(static_cast<Eigen::Index>(t)) +=
          weights[k] * rydberg_populations(psi, c.n_sites, HamiltonianMode::two_level_coherent).transpose();
      trace += weights[k] * psi.squaredNorm();
      if (rho.size()) rho += weights[k] * psi * psi.adjoint();
    }
    res.max_trace_error = std::max(res.max_trace_error, std::abs(trace - rho0.trace().real()));
    if (opt.keep_states) res.states.push_back(rho);
    if (t + 1 == grid.size()) res.final_state = rho;
  }
  res.min_eigenvalue = mix.eigenvalues()(0);
  return res;
}

}  // namespace

Eigen::MatrixXcd pure_density(const Eigen::VectorXcd& psi) { return psi * psi.adjoint(); }

std::vector<double> uniform_grid(double t_max, int n_samples) {
  if (n_samples < 2) throw ArgumentError("a grid needs at least two points");
  if (!(t_max > 0.0)) throw ArgumentError("t_max must be positive");
  std::vector<double> t(static_cast<std::size_t>(n_samples));
  for (int k = 0; k < n_samples; ++k) t[static_cast<std::size_t>(k)] = t_max * k / (n_samples - 1);
  return t;
}

std::vector<Eigen::VectorXcd> evolve_unitary(const ManyBodyHamiltonian& h, const Eigen::VectorXcd& psi0,
                                             const std::vector<double>& grid) {
  check_grid(grid);
  if (psi0.size() != h.dimension()) throw DimensionError("initial state does not match the Hamiltonian");
  const Eigen::MatrixXcd dense = Eigen::MatrixXcd(h.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
  const Eigen::VectorXcd coeff = es.eigenvectors().adjoint() * psi0;
  std::vector<Eigen::VectorXcd> out;
  out.reserve(grid.size());
  for (double t : grid) {
    Eigen::VectorXcd phased(coeff.size());
    for (Eigen::Index k = 0; k < coeff.size(); ++k) phased(k) = std::exp(-kI * es.eigenvalues()(k) * t) * coeff(k);
    out.push_back(es.eigenvectors() * phased);
  }
  return out;
}

MeResult evolve_master_equation(const SystemConfig& c, const Eigen::MatrixXcd& rho0, const std::vector<double>& grid,
                                HamiltonianMode mode, const MeOptions& opt) {
  validate(c);
  check_grid(grid);
  const int cap = mode == HamiltonianMode::three_level ? opt.max_sites_three_level : opt.max_sites_two_level;
  if (c.n_sites > cap) {
    throw DimensionError("master equation limited to " + std::to_string(cap) + " sites in this mode");
  }
  const auto dim = static_cast<Eigen::Index>(hilbert_dimension(c.n_sites, mode));
  if (rho0.rows() != dim || rho0.cols() != dim) throw DimensionError("rho0 has the wrong dimension");
  if (std::abs(rho0.trace() - 1.0) > 1e-8) throw ArgumentError("rho0 must have unit trace");
  if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw ArgumentError("rho0 must be Hermitian");

  if (mode == HamiltonianMode::two_level_coherent) return evolve_two_level(c, rho0, grid, opt);

  const auto h = build_hamiltonian(c, mode);
  Liouvillian L;
  L.heff = effective_hamiltonian(h, c.gamma_e);
  L.gamma = c.gamma_e;
  L.jumps.resize(static_cast<std::size_t>(c.n_sites));
  {
    std::size_t stride = 1;
    for (int i = c.n_sites - 1; i >= 0; --i) {
      for (Eigen::Index a = 0; a < dim; ++a) {
        if (local_level(static_cast<std::size_t>(a), i, c.n_sites, mode) == 0) {
          L.jumps[static_cast<std::size_t>(i)].emplace_back(a, a + static_cast<Eigen::Index>(stride));
        }
      }
      stride *= 3;
    }
  }

  std::vector<std::size_t> eig_points;
  {
    const std::size_t n_out = grid.size();
    int checks = opt.eigen_checks;
    if (checks <= 0) checks = dim <= 81 ? static_cast<int>(n_out) : 25;
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(checks), n_out);
    for (std::size_t k = 0; k < m; ++k) eig_points.push_back(m == 1 ? n_out - 1 : k * (n_out - 1) / (m - 1));
  }

  MeResult res;
  res.times = grid;
  res.rydberg.resize(static_cast<Eigen::Index>(grid.size()), c.n_sites);
  Eigen::MatrixXcd y = rho0;
  Eigen::MatrixXcd k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), k5(dim, dim), k6(dim, dim),
      k7(dim, dim), ytmp(dim, dim), ynew(dim, dim);
  double t = 0.0;
  double h_step = opt.initial_step;
  L.apply(y, k1);
  std::size_t next_eig = 0;

  auto record = [&](std::size_t idx) {
    res.rydberg.row(static_cast<Eigen::Index>(idx)) = diagonal_rydberg(y, c.n_sites, mode).transpose();
    const double tr_err = std::abs(y.trace().real() - 1.0);
    const double herm = (y - y.adjoint()).cwiseAbs().maxCoeff();
    res.max_trace_error = std::max(res.max_trace_error, tr_err);
    res.max_hermiticity_error = std::max(res.max_hermiticity_error, herm);
    if (next_eig < eig_points.size() && eig_points[next_eig] == idx) {
      res.min_eigenvalue = std::min(res.min_eigenvalue, hermitian_min_eigenvalue(y));
      ++next_eig;
    }
    if (tr_err > 1e-8 || herm > 1e-8 || res.min_eigenvalue < -1e-8) {
      throw IntegratorError("density matrix invariant violated at t = " + format_double(grid[idx]) +
                            " (trace error " + format_double(tr_err) + ", min eigenvalue " +
                            format_double(res.min_eigenvalue) + ")");
    }
    if (opt.keep_states) res.states.push_back(y);
  };

  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const double target = grid[idx];
    while (t < target) {
      const double remaining = target - t;
      const double hs = std::min({h_step, remaining, opt.max_step});
      ytmp = y + hs * a21 * k1;
      L.apply(ytmp, k2);
      ytmp = y + hs * (a31 * k1 + a32 * k2);
      L.apply(ytmp, k3);
      ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
      L.apply(ytmp, k4);
      ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      L.apply(ytmp, k5);
      ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      L.apply(ytmp, k6);
      ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      L.apply(ynew, k7);
      const Eigen::MatrixXcd err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double err_norm = 0.0;
      for (Eigen::Index j = 0; j < err.size(); ++j) {
        const double scale = opt.atol + opt.rtol * std::max(std::abs(y.data()[j]), std::abs(ynew.data()[j]));
        err_norm = std::max(err_norm, std::abs(err.data()[j]) / scale);
      }
      if (!std::isfinite(err_norm)) throw IntegratorError("non-finite error estimate at t = " + format_double(t));
      if (err_norm <= 1.0) {
        t = hs == remaining ? target : t + hs;
        y.swap(ynew);
        k1.swap(k7);
        ++res.steps_accepted;
      } else {
        ++res.steps_rejected;
      }
      const double factor = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
      // Do not let a step shortened to hit the grid shrink the next one.
      h_step = std::min(std::max(h_step, hs) * (err_norm <= 1.0 ? factor : std::min(factor, 1.0)), opt.max_step);
      if (h_step < 1e-12) throw IntegratorError("step size underflow at t = " + format_double(t));
    }
    record(idx);
  }
  res.final_state = y;
  return res;
}

}  // namespace rydkcm
