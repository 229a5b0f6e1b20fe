#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rydkcm/config.hpp"
#include "rydkcm/observables.hpp"
#include "rydkcm/trajectory.hpp"

namespace rydkcm {

/// n_sites i.i.d. uniform detunings on [-A, A] from the stream (seed, j).
std::vector<double> sample_detunings(int n_sites, double amplitude, std::uint64_t seed, std::uint64_t realization = 0);

struct DisorderPlan {
  double amplitude = 0.0;
  int n_rnd = 1;
  int n_traj = 1;
  std::uint64_t base_seed = 0;
};

/// Plan from the disorder fields of a config (A, n_rnd, n_traj, seed).
DisorderPlan disorder_plan(const SystemConfig& config);

struct DisorderResult {
  EnsembleAverage pooled;                          // over all n_rnd * n_traj trajectories
  std::vector<EnsembleAverage> realizations;       // one per detuning vector
  std::vector<std::vector<double>> detunings;      // the sampled vectors
  Eigen::VectorXd concentration_spread;  // across-realization standard deviation of r(t)
};

/// Runs plan.n_traj trajectories for each of plan.n_rnd detuning vectors.
/// Realization j draws its detunings from (base_seed, j) and trajectory k
/// inside it uses (base_seed, j, k). `sink`, if set, receives every record in
/// (j, k) order.
DisorderResult disorder_average(const SystemConfig& config, std::string_view initial_pattern,
                                const std::vector<double>& t_grid, const DisorderPlan& plan,
                                const std::function<void(std::uint64_t, TrajectoryRecord&&)>& sink = {});

enum class RateShift { speed_up, slow_down };

std::string_view to_string(RateShift s);

struct RateShiftCell {
  Species species;  // defect stands for defects and non-facilitated atoms
  double delta_star = 0.0;
  int sign = +1;    // sign of the random detuning
  double base_rate = 0.0;     // Gamma_up + Gamma_down at delta_star
  double shifted_rate = 0.0;  // same at delta_star + sign * A
  RateShift shift = RateShift::speed_up;
};

/// Effect of a random detuning of magnitude A on the facilitated (0),
/// defect/non-facilitated (delta_r) and blocked (-delta_r) columns, judged on
/// the total flip rate. Throws PreconditionError unless 0 < A < delta_r.
std::vector<RateShiftCell> rate_shift_classification(double amplitude, double delta_r, double omega_e,
                                                     double omega_r);

struct RelaxationTime {
  double time = 0.0;
  double plateau = 0.0;  // mean over the final window
  std::size_t index = 0;
};

/// 90% rise time: first grid time at which the series has covered all but
/// `band` of the distance from its initial value to the plateau, i.e.
/// |x(t) - plateau| <= band * |x(0) - plateau|. The plateau is the mean over
/// the final `final_fraction` of the grid. Throws InsufficientDataError for
/// fewer than 10 points.
RelaxationTime relaxation_time(const std::vector<double>& times, const Eigen::VectorXd& series,
                               double band = 0.1, double final_fraction = 0.1);

}  // namespace rydkcm
