#include "rydkcm/observables.hpp"

#include <cmath>
#include <string>

#include "rydkcm/errors.hpp"
#include "rydkcm/regime.hpp"
#include "rydkcm/single_atom.hpp"

namespace rydkcm {

void EnsembleAccumulator::add(const TrajectoryRecord& record) { add(record.times, record.samples); }

void EnsembleAccumulator::add(const std::vector<double>& times, const Eigen::MatrixXd& samples) {
  if (samples.rows() != static_cast<Eigen::Index>(times.size())) {
    throw ArgumentError("sample rows do not match the time grid");
  }
  if (count_ == 0) {
    times_ = times;
    mean_ = Eigen::MatrixXd::Zero(samples.rows(), samples.cols());
    m2_ = mean_;
    r_mean_ = Eigen::VectorXd::Zero(samples.rows());
    r_m2_ = r_mean_;
  } else if (times != times_ || samples.cols() != mean_.cols()) {
    throw ArgumentError("records do not share the output grid");
  }
  ++count_;
  const double n = static_cast<double>(count_);
  const Eigen::MatrixXd delta = samples - mean_;
  mean_ += delta / n;
  m2_.array() += delta.array() * (samples - mean_).array();

  const Eigen::VectorXd r = concentration(samples);
  const Eigen::VectorXd dr = r - r_mean_;
  r_mean_ += dr / n;
  r_m2_.array() += dr.array() * (r - r_mean_).array();
}

void EnsembleAccumulator::merge(const EnsembleAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  if (other.times_ != times_ || other.mean_.cols() != mean_.cols()) {
    throw ArgumentError("records do not share the output grid");
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const Eigen::MatrixXd delta = other.mean_ - mean_;
  mean_ += delta * (nb / n);
  m2_ += other.m2_ + delta.cwiseProduct(delta) * (na * nb / n);
  const Eigen::VectorXd dr = other.r_mean_ - r_mean_;
  r_mean_ += dr * (nb / n);
  r_m2_ += other.r_m2_ + dr.cwiseProduct(dr) * (na * nb / n);
  count_ += other.count_;
}

EnsembleAverage EnsembleAccumulator::result() const {
  if (count_ == 0) throw InsufficientDataError("no trajectories to average");
  EnsembleAverage out;
  out.times = times_;
  out.count = count_;
  out.mean = mean_;
  out.concentration = r_mean_;
  if (count_ < 2) {
    out.std_error = Eigen::MatrixXd::Zero(mean_.rows(), mean_.cols());
    out.concentration_error = Eigen::VectorXd::Zero(r_mean_.size());
    return out;
  }
  const double n = static_cast<double>(count_);
  // m2 can dip below zero by rounding when all samples agree.
  out.std_error = (m2_.array().max(0.0) / (n * (n - 1.0))).sqrt().matrix();
  out.concentration_error = (r_m2_.array().max(0.0) / (n * (n - 1.0))).sqrt().matrix();
  return out;
}

EnsembleAverage ensemble_average(const std::vector<TrajectoryRecord>& records) {
  EnsembleAccumulator acc;
  for (const auto& r : records) acc.add(r);
  return acc.result();
}

Eigen::VectorXd concentration(const Eigen::MatrixXd& populations) {
  if (populations.cols() == 0) return Eigen::VectorXd::Zero(populations.rows());
  return populations.rowwise().mean();
}

RateEstimate rate_from_periods(const std::vector<double>& lengths) {
  if (lengths.empty()) throw InsufficientDataError("no completed periods");
  RateEstimate est;
  est.periods = lengths.size();
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double x : lengths) {
    ++k;
    const double d = x - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (x - mean);
  }
  est.mean_length = mean;
  if (!(mean > 0.0)) throw InsufficientDataError("periods have zero total length");
  est.rate = 1.0 / mean;
  if (k > 1) {
    const double se_mean = std::sqrt(m2 / static_cast<double>(k - 1) / static_cast<double>(k));
    est.std_error = se_mean / (mean * mean);
  }
  return est;
}

BrightDarkStatistics bright_dark_statistics(const std::vector<TrajectoryRecord>& records,
                                            const std::vector<int>& sites) {
  std::vector<double> dark, bright;
  for (const auto& rec : records) {
    const auto n = static_cast<int>(rec.dark_periods.size());
    auto collect = [&](int i) {
      if (i < 0 || i >= n) throw ArgumentError("site " + std::to_string(i) + " out of range");
      const auto& d = rec.dark_periods[static_cast<std::size_t>(i)];
      const auto& b = rec.bright_periods[static_cast<std::size_t>(i)];
      dark.insert(dark.end(), d.begin(), d.end());
      bright.insert(bright.end(), b.begin(), b.end());
    };
    if (sites.empty()) {
      for (int i = 0; i < n; ++i) collect(i);
    } else {
      for (int i : sites) collect(i);
    }
  }
  if (dark.empty() && bright.empty()) throw InsufficientDataError("no completed bright or dark periods");
  BrightDarkStatistics out;
  if (!dark.empty()) out.gamma_down = rate_from_periods(dark);
  if (!bright.empty()) out.gamma_up = rate_from_periods(bright);
  return out;
}

ExcessConcentration excess_concentration_estimate(const SystemConfig& config, int n_nonfacilitated,
                                                  int n_defects, double t) {
  const double n = static_cast<double>(config.n_sites);
  ExcessConcentration out;
  if (t == 0.0) return out;
  out.delta_r = n_nonfacilitated * rate_up(config.delta_r, config.omega_e, config.omega_r) * t / n;
  out.delta_r_prime = n_defects * rate_down(config.delta_r, config.omega_e, config.omega_r) * t / n;
  return out;
}

SpeciesCounts count_species(const std::vector<std::uint8_t>& occupations, Boundary boundary) {
  SpeciesCounts c;
  for (int i = 0; i < static_cast<int>(occupations.size()); ++i) {
    switch (classify_species(occupations, i, boundary)) {
      case Species::defect: ++c.defects; break;
      case Species::facilitated: ++c.facilitated; break;
      case Species::non_facilitated: ++c.non_facilitated; break;
      case Species::blocked: ++c.blocked; break;
    }
  }
  return c;
}

}  // namespace rydkcm
