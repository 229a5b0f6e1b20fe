#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rydkcm/config.hpp"

namespace rydkcm {

struct JumpEvent {
  double time;
  int site;
};

/// One stochastic realization of the monitored many-body system.
struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;  // stream index j
  std::uint64_t index = 0;        // stream index k
  std::vector<JumpEvent> jumps;
  std::vector<double> times;
  Eigen::MatrixXd samples;  // rows: output times, cols: sites; r_i = <|r><r|_i>
  // Completed dark (r_i > 0.5) and bright periods per site, as lengths.
  std::vector<std::vector<double>> dark_periods;
  std::vector<std::vector<double>> bright_periods;
  long steps = 0;
  std::size_t max_sectors = 0;
  double pruned_weight = 0.0;  // probability discarded by sector pruning
};

/// Threshold on r_i that separates dark from bright periods.
inline constexpr double kDarkThreshold = 0.5;

/// An excursion of r_i above the threshold counts as a dark period only once
/// it has lasted this many relaxation times of the driven g/e manifold.
/// Shorter excursions (conditional r_i drifting past 0.5 just before the next
/// photon) stay part of the bright period.
inline constexpr double kDarkDwellFactor = 10.0;

/// Minimum dark dwell kDarkDwellFactor / kappa, where kappa is the slowest
/// no-jump decay rate of the resonantly driven g/e pair. Infinite at omega_e = 0.
double dark_dwell_time(double omega_e, double gamma_e = 1.0);
/// Largest per-step total jump probability accepted in fixed-step mode.
inline constexpr double kMaxStepJumpProbability = 0.1;
/// Largest gamma_e * time_step accepted in fixed-step mode.
inline constexpr double kMaxFixedStep = 0.05;
inline constexpr int kMaxTrajectorySites = 20;

/// Monte-Carlo wave-function trajectory of the three-level chain.
///
/// The state is stored per Rydberg configuration C as a g/e amplitude vector
/// over the remaining sites. Each step applies, for every site, the exact
/// 3x3 no-jump propagator with the Rydberg level shifted by the interaction
/// with the current Rydberg neighbors, symmetrized around a correction phase
/// for the double-counted pair energy. config.mcwf_mode selects the jump
/// scheme and config.prune_threshold > 0 keeps only configurations near the
/// populated ones (an approximation for long chains).
TrajectoryRecord run_trajectory(const SystemConfig& config, std::string_view initial_pattern,
                                const std::vector<double>& t_grid, std::uint64_t seed,
                                std::uint64_t realization = 0, std::uint64_t index = 0);

/// Same, from an arbitrary normalized 3^N state vector (site 0 slowest).
TrajectoryRecord run_trajectory(const SystemConfig& config, const Eigen::VectorXcd& psi0,
                                const std::vector<double>& t_grid, std::uint64_t seed,
                                std::uint64_t realization = 0, std::uint64_t index = 0);

/// Runs trajectories k = 0..n_traj-1 of realization j in parallel and hands
/// them to `sink` in index order.
void for_each_trajectory(const SystemConfig& config, std::string_view initial_pattern,
                         const std::vector<double>& t_grid, std::uint64_t realization, int n_traj,
                         const std::function<void(TrajectoryRecord&&)>& sink);

std::vector<TrajectoryRecord> run_trajectories(const SystemConfig& config, std::string_view initial_pattern,
                                               const std::vector<double>& t_grid, std::uint64_t realization,
                                               int n_traj);

}  // namespace rydkcm
