#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rydkcm/config.hpp"

namespace rydkcm {

enum class Constraint { unconstrained, one_sfm };

std::string_view to_string(Constraint c);
Constraint parse_constraint(std::string_view text);

/// Classical spin configuration; 1 = defect (up spin).
struct SpinConfig {
  std::vector<std::uint8_t> bits;
  Boundary boundary = Boundary::periodic;

  int size() const { return static_cast<int>(bits.size()); }
  int defects() const;
  /// From a pattern of 0/1 or g/r characters.
  static SpinConfig from_pattern(std::string_view pattern, Boundary boundary = Boundary::periodic);
  std::string pattern() const;  // 0/1 characters
  /// Index in the 2^N state space, site 0 the most significant bit.
  std::uint64_t index() const;
  static SpinConfig from_index(std::uint64_t index, int n_sites, Boundary boundary);
};

struct KcmParams {
  double d_eq = 0.25;
  Constraint constraint = Constraint::one_sfm;

  /// d_eq from inverse temperature beta and energy scale K.
  static KcmParams from_temperature(double beta, double K, Constraint constraint);
};

/// K times the number of defects.
double energy(const SpinConfig& config, double K = 1.0);

/// 1 / (1 + exp(beta K)).
double equilibrium_concentration(double beta, double K = 1.0);

/// Glauber rate of flipping `site`: (1 - d_eq) n_i + d_eq (1 - n_i), times
/// (n_{i-1} + n_{i+1}) under the one-spin facilitated constraint.
double flip_rate(const SpinConfig& config, int site, const KcmParams& params);

/// Steady-state defect concentration of the driven single atom,
/// gamma_e^2 / (2 (gamma_e^2 + omega_e^2)).
double driven_deq(double omega_e, double gamma_e = 1.0);

struct CtmcEvent {
  double time;
  int site;
};

struct CtmcTrajectory {
  SpinConfig initial;
  SpinConfig final_state;
  std::vector<CtmcEvent> events;
  double t_max = 0.0;
  bool absorbed = false;  // stopped because every rate vanished

  /// Configuration at time t (events at exactly t are applied).
  SpinConfig state_at(double t) const;
  /// Defect density averaged over [0, t_max].
  double time_averaged_density() const;
};

/// Event-driven (Gillespie) simulation of the rate equation. Uses the random
/// stream (seed, stream).
CtmcTrajectory simulate_ctmc(const SpinConfig& initial, const KcmParams& params, double t_max, std::uint64_t seed,
                             std::uint64_t stream = 0);

inline constexpr int kMaxExactKcmSites = 14;

/// Transition-rate generator Q (column convention: dp/dt = Q p) over the
/// 2^N configurations.
Eigen::SparseMatrix<double> kcm_generator(int n_sites, Boundary boundary, const KcmParams& params);

/// Normalized Boltzmann weights pi(n) proportional to (d_eq / (1 - d_eq))^{n_defects}.
Eigen::VectorXd boltzmann_distribution(int n_sites, double d_eq);

/// max |Gamma(m->n) pi(m) - Gamma(n->m) pi(n)| over all single-flip pairs.
double detailed_balance_residual(int n_sites, Boundary boundary, const KcmParams& params);

/// Probability vectors at each grid time, propagated by uniformization.
/// Throws DimensionError for more than kMaxExactKcmSites sites.
std::vector<Eigen::VectorXd> exact_rate_equation(const Eigen::VectorXd& initial_distribution, int n_sites,
                                                 Boundary boundary, const KcmParams& params,
                                                 const std::vector<double>& t_grid);

/// Mean position of the defects on an open chain; NaN without defects.
double defect_center(const SpinConfig& config);

}  // namespace rydkcm
