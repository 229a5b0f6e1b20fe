#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "rydkcm/config.hpp"

namespace rydkcm {

using cplx = std::complex<double>;

/// Single-atom H - (i gamma_e/2)|e><e| in the (g, e, r) basis, gamma_e = 1.
Eigen::Matrix3cd effective_hamiltonian(double omega_e, double omega_r, double delta_r);

struct EffectiveEigensystem {
  // Exact eigenpairs, sorted by decreasing |Im lambda|; index 2 is the
  // long-lived (dark) eigenvalue. Columns of `vectors` have unit norm.
  std::array<cplx, 3> lambda{};
  Eigen::Matrix3cd vectors;
  // Expansion of the initial state on the (non-orthogonal) eigenvectors.
  std::array<cplx, 3> coefficients{};
  double p_dark = 0.0;  // |c_3|^2 from the perturbative eigenvector

  // Second-order Brillouin-Wigner quantities.
  cplx lambda3_perturbative{};
  cplx c3_perturbative{};
  cplx e_minus{}, e_plus{};      // eigenvalues of the unperturbed g/e block
  cplx omega_c{}, omega_s{};     // rotated Rydberg couplings
  bool degenerate = false;       // exact eigenvalues closer than 1e-12
  double perturbative_rel_error = 0.0;  // on |Im lambda_3|; 0 when degenerate

  /// |-2 Im lambda_3| of the exact eigenvalue.
  double dark_decay_rate() const;
};

EffectiveEigensystem bw_eigensystem(double omega_e, double omega_r, double delta_r,
                                    AtomLevel initial = AtomLevel::g);

/// Bright-to-dark rate (0 -> 1) at effective detuning delta_star.
double rate_up(double delta_star, double omega_e, double omega_r);
/// Dark-to-bright rate (1 -> 0) at effective detuning delta_star.
double rate_down(double delta_star, double omega_e, double omega_r);

struct RatePair {
  double gamma_up = 0.0;
  double gamma_down = 0.0;
};
RatePair rates(double delta_star, double omega_e, double omega_r);

/// Probability that no photon is emitted up to t: the squared norm of the
/// no-jump evolution sum_n c_n exp(-i lambda_n t)|u_n>.
double delay_function(double t, const EffectiveEigensystem& es);
/// sum_n |c_n|^2 exp(2 t Im lambda_n), the diagonal part of delay_function.
/// Differs from it at short times because the eigenvectors are not orthogonal.
double delay_function_diagonal(double t, const EffectiveEigensystem& es);

/// Lindblad generator of the single atom acting on
/// (rho_eg, rho_ge, rho_ee, rho_gg, rho_rg, rho_gr, rho_rr, rho_er, rho_re).
Eigen::Matrix<cplx, 9, 9> bloch_generator(double omega_e, double omega_r, double delta_r = 0.0);

struct BlochSteadyState {
  double rho_rr = 0.0;          // closed form
  double rho_rr_numeric = 0.0;  // from the generator kernel
  double kernel_residual = 0.0; // |L rho| of the normalized kernel vector
};

BlochSteadyState bloch_steady_state(double omega_e, double omega_r);

enum class SlopeMethod {
  quadratic_fit,   // least-squares a + b t + c t^2 on [fit_begin, fit_end], returns |b|
  first_interval,  // forward difference over the first grid interval
};

struct SlopeOptions {
  SlopeMethod method = SlopeMethod::quadratic_fit;
  double fit_begin = 40.0;
  double fit_end = 100.0;
};

/// Transition rate from the short-time evolution of rho_rr(t) started in
/// |g> (initial_rydberg = false, rate = +slope) or |r> (true, rate = -slope).
/// A negative result means the series moves against the expected direction.
double estimate_rates_from_slope(const std::vector<double>& times, const std::vector<double>& rho_rr,
                                 bool initial_rydberg, const SlopeOptions& options = {});

}  // namespace rydkcm
