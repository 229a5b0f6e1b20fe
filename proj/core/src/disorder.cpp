#include "rydkcm/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rydkcm/errors.hpp"
#include "rydkcm/random.hpp"
#include "rydkcm/single_atom.hpp"

namespace rydkcm {

std::vector<double> sample_detunings(int n_sites, double amplitude, std::uint64_t seed, std::uint64_t realization) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw ArgumentError("disorder amplitude must be >= 0");
  if (n_sites < 0) throw ArgumentError("n_sites must be non-negative");
  std::vector<double> d(static_cast<std::size_t>(n_sites), 0.0);
  if (amplitude == 0.0) return d;
  Rng rng = make_stream_rng(seed, realization);
  for (auto& x : d) x = amplitude * (2.0 * uniform01(rng) - 1.0);
  return d;
}

DisorderPlan disorder_plan(const SystemConfig& config) {
  return {config.disorder_amplitude, config.n_rnd, config.n_traj, config.seed};
}

DisorderResult disorder_average(const SystemConfig& config, std::string_view initial_pattern,
                                const std::vector<double>& t_grid, const DisorderPlan& plan,
                                const std::function<void(std::uint64_t, TrajectoryRecord&&)>& sink) {
  if (plan.n_rnd < 1 || plan.n_traj < 1) throw ArgumentError("n_rnd and n_traj must be >= 1");
  DisorderResult out;
  EnsembleAccumulator pooled;
  SystemConfig c = config;
  c.seed = plan.base_seed;
  for (int j = 0; j < plan.n_rnd; ++j) {
    const auto rj = static_cast<std::uint64_t>(j);
    auto det = sample_detunings(config.n_sites, plan.amplitude, plan.base_seed, rj);
    c.random_detunings = det;
    out.detunings.push_back(std::move(det));
    EnsembleAccumulator acc;
    for_each_trajectory(c, initial_pattern, t_grid, rj, plan.n_traj, [&](TrajectoryRecord&& rec) {
      acc.add(rec);
      if (sink) sink(rj, std::move(rec));
    });
    pooled.merge(acc);
    out.realizations.push_back(acc.result());
  }
  out.pooled = pooled.result();

  const auto rows = out.pooled.concentration.size();
  out.concentration_spread = Eigen::VectorXd::Zero(rows);
  if (plan.n_rnd > 1) {
    for (Eigen::Index t = 0; t < rows; ++t) {
      double mean = 0.0;
      for (const auto& r : out.realizations) mean += r.concentration(t);
      mean /= plan.n_rnd;
      double var = 0.0;
      for (const auto& r : out.realizations) var += (r.concentration(t) - mean) * (r.concentration(t) - mean);
      out.concentration_spread(t) = std::sqrt(var / (plan.n_rnd - 1));
    }
  }
  return out;
}

std::string_view to_string(RateShift s) { return s == RateShift::speed_up ? "speed_up" : "slow_down"; }

std::vector<RateShiftCell> rate_shift_classification(double amplitude, double delta_r, double omega_e,
                                                     double omega_r) {
  if (!(amplitude > 0.0) || !(amplitude < std::abs(delta_r))) {
    throw PreconditionError("rate_shift_classification needs 0 < A < |delta_r|");
  }
  auto total = [&](double d) { return rate_up(d, omega_e, omega_r) + rate_down(d, omega_e, omega_r); };
  const struct {
    Species species;
    double delta_star;
  } columns[] = {{Species::facilitated, 0.0}, {Species::defect, delta_r}, {Species::blocked, -delta_r}};
  std::vector<RateShiftCell> cells;
  for (const auto& col : columns) {
    for (int sign : {+1, -1}) {
      RateShiftCell c;
      c.species = col.species;
      c.delta_star = col.delta_star;
      c.sign = sign;
      c.base_rate = total(col.delta_star);
      c.shifted_rate = total(col.delta_star + sign * amplitude);
      c.shift = c.shifted_rate > c.base_rate ? RateShift::speed_up : RateShift::slow_down;
      cells.push_back(c);
    }
  }
  return cells;
}

RelaxationTime relaxation_time(const std::vector<double>& times, const Eigen::VectorXd& series, double band,
                               double final_fraction) {
  const auto n = static_cast<Eigen::Index>(times.size());
  if (series.size() != n) throw ArgumentError("series length differs from the time grid");
  if (n < 10) throw InsufficientDataError("relaxation time needs at least 10 points");
  if (!(final_fraction > 0.0 && final_fraction <= 1.0)) throw ArgumentError("final_fraction must lie in (0, 1]");
  const Eigen::Index window = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::floor(n * final_fraction)));
  RelaxationTime out;
  out.plateau = series.tail(window).mean();
  // Floor for series that start on their plateau (rounding in the mean).
  const double tol = std::max(band * std::abs(series(0) - out.plateau), 1e-12 * std::abs(out.plateau));
  Eigen::Index first = 0;
  while (first < n - 1 && std::abs(series(first) - out.plateau) > tol) ++first;
  out.index = static_cast<std::size_t>(first);
  out.time = times[out.index];
  return out;
}

}  // namespace rydkcm
