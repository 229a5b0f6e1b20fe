#include <algorithm>
#include <array>

#include "rydkcm/cluster_model.hpp"
#include "rydkcm/csv.hpp"
#include "rydkcm/disorder.hpp"
#include "rydkcm/errors.hpp"
#include "rydkcm/experiments.hpp"
#include "rydkcm/hamiltonian.hpp"
#include "rydkcm/master_equation.hpp"
#include "rydkcm/trajectory.hpp"
#include "run_recorder.hpp"

namespace rydkcm {

namespace {

using detail::RunRecorder;

constexpr std::array<std::string_view, 8> kFigureIds{"fig2", "fig3", "fig4a", "fig4b", "fig6", "fig7", "fig8", "fig9"};

// Parameters shared by the N=10 chain figures.
SystemConfig chain_base() {
  SystemConfig c;
  c.n_sites = 10;
  c.omega_e = 1.0;
  c.omega_r = 0.03;
  c.gamma_e = 1.0;
  c.delta_r = 3.0;
  c.interaction_strength = 3.0;
  c.boundary = Boundary::periodic;
  c.initial_pattern = "rggggrgggg";
  c.t_max = 1.7e4;
  c.n_samples = 341;
  c.mcwf_mode = McwfMode::waiting_time;
  c.time_step = 0.5;
  c.prune_threshold = 1e-3;
  c.n_traj = 500;
  c.record_jumps = false;
  return c;
}

void write_series(CsvWriter& w, std::string_view label, const std::vector<double>& times, const Eigen::VectorXd& r,
                  const Eigen::VectorXd* err) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    w.field(label).field(times[k]).field(r(row)).field(err ? (*err)(row) : 0.0);
    w.end_row();
  }
}

EnsembleAverage run_ensemble(const SystemConfig& c, std::string_view pattern, const std::vector<double>& grid,
                             RunRecorder& rec) {
  EnsembleAccumulator acc;
  for_each_trajectory(c, pattern, grid, 0, c.n_traj, [&](TrajectoryRecord&& r) { acc.add(r); });
  rec.seed(c.seed);
  return acc.result();
}

Eigen::VectorXd single_atom_curve(const SystemConfig& base, double delta, std::string_view pattern,
                                  const std::vector<double>& grid) {
  SystemConfig one = base;
  one.n_sites = 1;
  one.delta_r = delta;
  one.interaction_strength = 0.0;
  one.random_detunings.reset();
  one.disorder_amplitude = 0.0;
  MeOptions me;
  me.max_step = 1.0;
  const auto res = evolve_master_equation(one, pure_density(product_state(pattern, HamiltonianMode::three_level)),
                                          grid, HamiltonianMode::three_level, me);
  return res.rydberg.col(0);
}

void fig2(const SystemConfig& c, RunRecorder& rec) {
  const auto grid = uniform_grid(c.t_max, c.n_samples);
  CsvWriter traj(rec.file("trajectories.csv"), {"panel", "delta_r", "time", "site", "r"});
  CsvWriter jumps(rec.file("jumps.csv"), {"panel", "trajectory", "time", "site"});
  const std::array<std::pair<std::string_view, double>, 2> panels{{{"a", 0.0}, {"b", 10.0}}};
  for (const auto& [panel, delta] : panels) {
    SystemConfig p = c;
    p.delta_r = delta;
    p.interaction_strength = delta;
    p.record_jumps = true;
    for (int k = 0; k < c.n_traj; ++k) {
      const auto r = run_trajectory(p, p.initial_pattern, grid, p.seed, 0, static_cast<std::uint64_t>(k));
      for (std::size_t t = 0; t < grid.size(); ++t) {
        for (int i = 0; i < p.n_sites; ++i) {
          traj.field(panel).field(delta).field(grid[t]).field(i).field(r.samples(static_cast<Eigen::Index>(t), i));
          traj.end_row();
        }
      }
      for (const auto& j : r.jumps) {
        jumps.field(panel).field(k).field(j.time).field(j.site);
        jumps.end_row();
      }
      rec.summary(std::string("jumps_") + std::string(panel), static_cast<double>(r.jumps.size()));
    }
  }
  rec.seed(c.seed);
}

void fig3(const SystemConfig& c, RunRecorder& rec) {
  const auto grid = uniform_grid(c.t_max, c.n_samples);
  const auto avg = run_ensemble(c, c.initial_pattern, grid, rec);
  write_populations_csv(rec.file("populations.csv"), grid, avg.mean, avg.std_error);
  write_concentration_csv(rec.file("concentration.csv"), grid, avg.concentration, avg.concentration_error);
  // Single-atom references: resonant from g and r, off-resonant from g.
  const auto from_g = single_atom_curve(c, 0.0, "g", grid);
  const auto from_r = single_atom_curve(c, 0.0, "r", grid);
  const auto off = single_atom_curve(c, c.delta_r, "g", grid);
  CsvWriter w(rec.file("single_atom.csv"), {"time", "rho_rr_resonant_g", "rho_rr_resonant_r", "rho_rr_offresonant_g"});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    w.field(grid[k]).field(from_g(row)).field(from_r(row)).field(off(row));
    w.end_row();
  }
  rec.summary("final_concentration", avg.concentration(avg.concentration.size() - 1));
}

void fig4a(const SystemConfig& c, RunRecorder& rec) {
  const auto grid = uniform_grid(c.t_max, c.n_samples);
  CsvWriter w(rec.file("concentration.csv"), {"initial_state", "time", "r", "stderr"});
  for (std::string_view pattern : {"rrggrgrrgg", "rgggrggggg", "rggggggggg"}) {
    SystemConfig p = c;
    p.initial_pattern = std::string(pattern);
    validate(p);
    const auto avg = run_ensemble(p, pattern, grid, rec);
    write_series(w, pattern, grid, avg.concentration, &avg.concentration_error);
    rec.summary("final_r_" + std::string(pattern), avg.concentration(avg.concentration.size() - 1));
  }
}

void fig4b(const SystemConfig& c, RunRecorder& rec) {
  const auto grid = uniform_grid(c.t_max, c.n_samples);
  CsvWriter w(rec.file("concentration.csv"), {"potential", "time", "r", "stderr"});
  for (Potential pot : {Potential::nearest_neighbor, Potential::van_der_waals, Potential::dipolar}) {
    SystemConfig p = c;
    p.potential = pot;
    p.potential_cutoff = pot == Potential::nearest_neighbor ? 1 : 3;
    validate(p);
    const auto avg = run_ensemble(p, p.initial_pattern, grid, rec);
    write_series(w, to_string(pot), grid, avg.concentration, &avg.concentration_error);
    rec.summary("final_r_" + std::string(to_string(pot)), avg.concentration(avg.concentration.size() - 1));
  }
}

void fig6(const SystemConfig& c, RunRecorder& rec) {
  const auto grid = uniform_grid(c.t_max, c.n_samples);
  CsvWriter w(rec.file("concentration.csv"), {"series", "time", "r", "stderr"});
  const auto basis = enumerate_subspace(c.n_sites, c.initial_pattern, c.boundary);
  const auto red = evolve_reduced(build_reduced_hamiltonian(basis, c.omega_r), c.initial_pattern, grid);
  const auto full = evolve_full_two_level(c, c.initial_pattern, grid, &basis);
  write_series(w, "full_omega_e_0", grid, full.concentration, nullptr);
  write_series(w, "reduced_omega_e_0", grid, red.concentration, nullptr);
  double diff = 0.0;
  for (Eigen::Index k = 0; k < red.concentration.size(); ++k) {
    if (grid[static_cast<std::size_t>(k)] <= 0.1 * c.delta_r / (c.omega_r * c.omega_r)) {
      diff = std::max(diff, std::abs(red.concentration(k) - full.concentration(k)));
    }
  }
  rec.summary("max_full_reduced_difference_short_time", diff);
  for (double oe : {0.03, 0.1, 1.0}) {
    SystemConfig p = c;
    p.omega_e = oe;
    const auto avg = run_ensemble(p, p.initial_pattern, grid, rec);
    write_series(w, "mcwf_omega_e_" + format_double(oe), grid, avg.concentration, &avg.concentration_error);
  }
}

void fig7(const SystemConfig& c, RunRecorder& rec) {
  CsvWriter w(rec.file("spectrum.csv"), {"n_sites", "index", "energy"});
  for (int n = 2; n <= 14; ++n) {
    std::string pattern(static_cast<std::size_t>(n), 'g');
    pattern[static_cast<std::size_t>(n / 2)] = 'r';
    const auto basis = enumerate_subspace(n, pattern, Boundary::open);
    const auto e = spectrum(build_reduced_hamiltonian(basis, c.omega_r));
    for (Eigen::Index k = 0; k < e.size(); ++k) {
      w.field(n).field(static_cast<long long>(k)).field(e(k));
      w.end_row();
    }
    rec.summary("max_abs_energy_n" + std::to_string(n), e.cwiseAbs().maxCoeff());
  }
}

// Pools the first 1, 5, ..., n_rnd realizations of a single disorder run.
void fig8(const SystemConfig& c, RunRecorder& rec) {
  const auto grid = uniform_grid(c.t_max, c.n_samples);
  const auto plan = disorder_plan(c);
  std::vector<EnsembleAccumulator> per(static_cast<std::size_t>(plan.n_rnd));
  const auto res = disorder_average(c, c.initial_pattern, grid, plan,
                                    [&](std::uint64_t j, TrajectoryRecord&& r) { per[j].add(r); });
  CsvWriter w(rec.file("concentration.csv"), {"n_rnd", "time", "r", "stderr"});
  std::vector<int> prefixes;
  for (int n : {1, 5, plan.n_rnd}) {
    if (n <= plan.n_rnd && std::find(prefixes.begin(), prefixes.end(), n) == prefixes.end()) prefixes.push_back(n);
  }
  for (int n : prefixes) {
    EnsembleAccumulator pooled;
    for (int j = 0; j < n; ++j) pooled.merge(per[static_cast<std::size_t>(j)]);
    const auto avg = pooled.result();
    write_series(w, std::to_string(n), grid, avg.concentration, &avg.concentration_error);
    rec.summary("relaxation_time_n_rnd_" + std::to_string(n), relaxation_time(grid, avg.concentration).time);
  }
  write_populations_csv(rec.file("populations.csv"), grid, res.pooled.mean, res.pooled.std_error);

  SystemConfig ref = c;
  ref.disorder_amplitude = 0.0;
  ref.random_detunings.reset();
  const auto avg0 = run_ensemble(ref, ref.initial_pattern, grid, rec);
  write_concentration_csv(rec.file("reference.csv"), grid, avg0.concentration, avg0.concentration_error);
  rec.summary("relaxation_time_reference", relaxation_time(grid, avg0.concentration).time);

  CsvWriter t(rec.file("rate_shifts.csv"), {"species", "delta_star", "sign", "base_rate", "shifted_rate", "shift"});
  for (const auto& cell : rate_shift_classification(c.disorder_amplitude, c.delta_r, c.omega_e, c.omega_r)) {
    t.field(to_string(cell.species)).field(cell.delta_star).field(cell.sign).field(cell.base_rate)
        .field(cell.shifted_rate).field(to_string(cell.shift));
    t.end_row();
  }
  rec.seed(c.seed);
}

// One run of n_traj trajectories, pooled over the prefixes 10, 100, n_traj.
void fig9(const SystemConfig& c, RunRecorder& rec) {
  const auto grid = uniform_grid(c.t_max, c.n_samples);
  std::vector<int> prefixes;
  for (int n : {10, 100, c.n_traj}) {
    if (n <= c.n_traj && std::find(prefixes.begin(), prefixes.end(), n) == prefixes.end()) prefixes.push_back(n);
  }
  std::vector<EnsembleAccumulator> acc(prefixes.size());
  for_each_trajectory(c, c.initial_pattern, grid, 0, c.n_traj, [&](TrajectoryRecord&& r) {
    for (std::size_t p = 0; p < prefixes.size(); ++p) {
      if (r.index < static_cast<std::uint64_t>(prefixes[p])) acc[p].add(r);
    }
  });
  const auto exact = single_atom_curve(c, c.delta_r, c.initial_pattern, grid);
  CsvWriter w(rec.file("concentration.csv"), {"n_traj", "time", "R", "stderr"});
  for (std::size_t p = 0; p < prefixes.size(); ++p) {
    const auto avg = acc[p].result();
    write_series(w, std::to_string(prefixes[p]), grid, avg.concentration, &avg.concentration_error);
    rec.summary("sup_distance_n_traj_" + std::to_string(prefixes[p]),
                (avg.concentration - exact).cwiseAbs().maxCoeff());
  }
  write_concentration_csv(rec.file("master_equation.csv"), grid, exact, Eigen::VectorXd::Zero(exact.size()));
  rec.seed(c.seed);
}

}  // namespace

std::vector<std::string> figure_ids() { return {kFigureIds.begin(), kFigureIds.end()}; }

SystemConfig figure_config(std::string_view id) {
  SystemConfig c = chain_base();
  if (id == "fig2") {
    c.n_traj = 1;
    c.t_max = 2e4;
    c.n_samples = 401;
  } else if (id == "fig3" || id == "fig4a") {
  } else if (id == "fig4b") {
    c.initial_pattern = "rgggrggggg";
  } else if (id == "fig6") {
    c.n_sites = 9;
    c.boundary = Boundary::open;
    c.initial_pattern = "ggggrgggg";
    c.t_max = 1000.0;
    c.n_samples = 501;
  } else if (id == "fig7") {
    c.delta_r = 0.0;
    c.interaction_strength = 0.0;
    c.n_traj = 1;
  } else if (id == "fig8") {
    c.disorder_amplitude = 0.5;
    c.n_rnd = 10;
    c.n_traj = 100;
  } else if (id == "fig9") {
    c.n_sites = 1;
    c.delta_r = 0.0;
    c.interaction_strength = 0.0;
    c.initial_pattern = "g";
    c.mcwf_mode = McwfMode::fixed;
    c.time_step = 1e-2;
    c.prune_threshold = 0.0;
    c.t_max = 2000.0;
    c.n_samples = 401;
  } else {
    throw ConfigError("unknown figure id '" + std::string(id) + "'");
  }
  return c;
}

namespace detail {

void run_figure(std::string_view id, const SystemConfig& config, RunRecorder& rec) {
  if (id == "fig2") return fig2(config, rec);
  if (id == "fig3") return fig3(config, rec);
  if (id == "fig4a") return fig4a(config, rec);
  if (id == "fig4b") return fig4b(config, rec);
  if (id == "fig6") return fig6(config, rec);
  if (id == "fig7") return fig7(config, rec);
  if (id == "fig8") return fig8(config, rec);
  if (id == "fig9") return fig9(config, rec);
  throw ConfigError("unknown figure id '" + std::string(id) + "'");
}

}  // namespace detail

}  // namespace rydkcm
