#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rydkcm/config.hpp"
#include "rydkcm/trajectory.hpp"

namespace rydkcm {

/// Trajectory-averaged per-site Rydberg populations R_i(t) and the
/// concentration r(t), each with its standard error of the mean.
struct EnsembleAverage {
  std::vector<double> times;
  Eigen::MatrixXd mean;       // rows: times, cols: sites
  Eigen::MatrixXd std_error;  // zero for a single record
  Eigen::VectorXd concentration;
  Eigen::VectorXd concentration_error;  // from the per-trajectory r(t)
  std::size_t count = 0;
};

/// Ordered running mean/variance (Welford) over trajectory samples. Adding
/// records in the same order always gives bit-identical results.
class EnsembleAccumulator {
 public:
  void add(const TrajectoryRecord& record);
  void add(const std::vector<double>& times, const Eigen::MatrixXd& samples);
  /// Merges another accumulator as if its records had been added after ours.
  void merge(const EnsembleAccumulator& other);
  std::size_t count() const { return count_; }
  EnsembleAverage result() const;

 private:
  std::vector<double> times_;
  std::size_t count_ = 0;
  Eigen::MatrixXd mean_, m2_;
  Eigen::VectorXd r_mean_, r_m2_;
};

/// Throws InsufficientDataError on an empty list and ArgumentError when the
/// output grids differ.
EnsembleAverage ensemble_average(const std::vector<TrajectoryRecord>& records);

/// r(t) = (1/N) sum_i R_i(t) for a times x sites matrix.
Eigen::VectorXd concentration(const Eigen::MatrixXd& populations);

struct RateEstimate {
  double rate = 0.0;  // 1 / mean period length
  double std_error = 0.0;
  double mean_length = 0.0;
  std::size_t periods = 0;
};

struct BrightDarkStatistics {
  RateEstimate gamma_down;  // from dark periods (1 -> 0)
  RateEstimate gamma_up;    // from bright periods (0 -> 1)
};

/// Rates from the completed dark and bright periods, pooled over records and
/// over `sites` (all sites when empty). A rate whose period list is empty is
/// reported with periods = 0 and rate = 0.
BrightDarkStatistics bright_dark_statistics(const std::vector<TrajectoryRecord>& records,
                                            const std::vector<int>& sites = {});

/// Rate from a list of period lengths. Throws InsufficientDataError when the
/// list is empty.
RateEstimate rate_from_periods(const std::vector<double>& lengths);

struct ExcessConcentration {
  double delta_r = 0.0;        // excess from non-facilitated excitations
  double delta_r_prime = 0.0;  // deficit from isolated defect decay
};

/// delta_r = N_nf Gamma_up(Delta_r) t / N, delta_r' = N_d Gamma_down(Delta_r) t / N.
ExcessConcentration excess_concentration_estimate(const SystemConfig& config, int n_nonfacilitated,
                                                  int n_defects, double t);

struct SpeciesCounts {
  int defects = 0;
  int facilitated = 0;
  int non_facilitated = 0;
  int blocked = 0;
};

SpeciesCounts count_species(const std::vector<std::uint8_t>& occupations, Boundary boundary);

}  // namespace rydkcm
