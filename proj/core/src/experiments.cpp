#include "rydkcm/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "rydkcm/cluster_model.hpp"
#include "rydkcm/csv.hpp"
#include "rydkcm/disorder.hpp"
#include "rydkcm/errors.hpp"
#include "rydkcm/hamiltonian.hpp"
#include "rydkcm/kcm.hpp"
#include "rydkcm/master_equation.hpp"
#include "rydkcm/parallel.hpp"
#include "rydkcm/single_atom.hpp"
#include "rydkcm/trajectory.hpp"
#include "run_recorder.hpp"

namespace rydkcm {

namespace detail {

RunRecorder::RunRecorder(std::string command, const Options& options, const SystemConfig& config,
                         std::filesystem::path out_dir)
    : out_dir_(std::move(out_dir)), start_(std::chrono::steady_clock::now()) {
  manifest_.command = std::move(command);
  manifest_.options = options;
  manifest_.config = to_key_values(config);
  manifest_.version = library_version();
  manifest_.threads = thread_count();
  std::filesystem::create_directories(out_dir_);
}

std::filesystem::path RunRecorder::file(const std::string& name) {
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
  return out_dir_ / name;
}

void RunRecorder::seed(std::uint64_t s) {
  if (std::find(manifest_.seeds.begin(), manifest_.seeds.end(), s) == manifest_.seeds.end()) {
    manifest_.seeds.push_back(s);
  }
}

RunManifest RunRecorder::finish() {
  manifest_.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  manifest_.outputs.clear();
  for (const auto& f : files_) manifest_.outputs.push_back(describe_output(out_dir_, f));
  write_manifest(out_dir_ / "manifest.json", manifest_);
  return manifest_;
}

}  // namespace detail

namespace {

using detail::RunRecorder;

class OptionReader {
 public:
  OptionReader(const Options& o, std::string command) : opts_(o), command_(std::move(command)) {}

  std::string str(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    const auto it = opts_.find(key);
    return it == opts_.end() ? fallback : it->second;
  }
  bool has(const std::string& key) const { return opts_.count(key) != 0; }
  double num(const std::string& key, double fallback) {
    const std::string s = str(key, "");
    if (s.empty()) return fallback;
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("option " + key + " is not a number: " + s);
    return v;
  }
  int integer(const std::string& key, int fallback) {
    const std::string s = str(key, "");
    if (s.empty()) return fallback;
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("option " + key + " is not an integer: " + s);
    return v;
  }
  bool flag(const std::string& key, bool fallback) {
    const std::string s = str(key, "");
    if (s.empty()) return fallback;
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("option " + key + " is not a boolean: " + s);
  }
  // Rejects options the command never read.
  void finish() const {
    for (const auto& [k, v] : opts_) {
      if (!used_.count(k)) throw ConfigError("unknown option '" + k + "' for command " + command_);
    }
  }

 private:
  const Options& opts_;
  std::string command_;
  std::set<std::string> used_;
};

std::string pattern_or_ground(const SystemConfig& c) {
  return c.initial_pattern.empty() ? std::string(static_cast<std::size_t>(c.n_sites), 'g') : c.initial_pattern;
}

void write_jump_rows(CsvWriter& w, const TrajectoryRecord& rec) {
  for (const auto& j : rec.jumps) {
    w.field(static_cast<long long>(rec.index)).field(j.time).field(j.site);
    w.end_row();
  }
}

void cmd_rates(OptionReader& opt, const SystemConfig& c, RunRecorder& rec) {
  const int n_traj = opt.integer("trajectories", 0);
  opt.finish();
  CsvWriter w(rec.file("rates.csv"), {"delta_star", "rate_up", "rate_down", "method"});
  for (double d : {0.0, 3.0, -3.0, 10.0, -10.0}) {
    w.field(d).field(rate_up(d, c.omega_e, c.omega_r)).field(rate_down(d, c.omega_e, c.omega_r)).field("closed_form");
    w.end_row();
  }
  for (double d : {0.0, 3.0, 10.0}) {
    const auto es = bw_eigensystem(c.omega_e, c.omega_r, d);
    w.field(d).field("").field(es.dark_decay_rate()).field("exact_eigenvalue");
    w.end_row();
  }
  const auto es0 = bw_eigensystem(c.omega_e, c.omega_r, 0.0);
  w.field(0.0).field("").field(std::abs(2.0 * es0.lambda3_perturbative.imag())).field("perturbative");
  w.end_row();

  // Short-time slope of the exact single-atom master equation.
  SystemConfig one = c;
  one.n_sites = 1;
  one.delta_r = 0.0;
  one.interaction_strength = 0.0;
  one.random_detunings.reset();
  const auto grid = uniform_grid(100.0, 1001);
  MeOptions me;
  me.max_step = 0.5;
  const auto from_g = evolve_master_equation(one, pure_density(product_state("g", HamiltonianMode::three_level)), grid,
                                             HamiltonianMode::three_level, me);
  const auto from_r = evolve_master_equation(one, pure_density(product_state("r", HamiltonianMode::three_level)), grid,
                                             HamiltonianMode::three_level, me);
  std::vector<double> rg(grid.size()), rr(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    rg[k] = from_g.rydberg(static_cast<Eigen::Index>(k), 0);
    rr[k] = from_r.rydberg(static_cast<Eigen::Index>(k), 0);
  }
  const double up = estimate_rates_from_slope(grid, rg, false);
  const double down = estimate_rates_from_slope(grid, rr, true);
  w.field(0.0).field(up).field(down).field("me_slope");
  w.end_row();
  rec.summary("me_slope_rate_up", up);
  rec.summary("me_slope_rate_down", down);

  if (n_traj > 0) {
    SystemConfig qt = one;
    qt.record_jumps = false;
    const auto qgrid = uniform_grid(c.t_max, std::max(2, std::min(c.n_samples, 101)));
    std::vector<TrajectoryRecord> recs;
    for_each_trajectory(qt, "g", qgrid, 0, n_traj, [&](TrajectoryRecord&& r) {
      r.samples.resize(0, 0);
      recs.push_back(std::move(r));
    });
    const auto stats = bright_dark_statistics(recs);
    w.field(0.0).field(stats.gamma_up.rate).field(stats.gamma_down.rate).field("trajectory");
    w.end_row();
    rec.summary("trajectory_rate_up", stats.gamma_up.rate);
    rec.summary("trajectory_rate_down", stats.gamma_down.rate);
    rec.summary("trajectory_rate_down_stderr", stats.gamma_down.std_error);
    rec.seed(c.seed);
  }
}

void cmd_evolve_me(OptionReader& opt, const SystemConfig& c, RunRecorder& rec) {
  const std::string mode_name = opt.str("mode", "three_level");
  opt.finish();
  HamiltonianMode mode;
  if (mode_name == "three_level") {
    mode = HamiltonianMode::three_level;
  } else if (mode_name == "two_level") {
    mode = HamiltonianMode::two_level_coherent;
  } else {
    throw ConfigError("mode must be three_level or two_level");
  }
  const auto grid = uniform_grid(c.t_max, c.n_samples);
  const auto rho0 = pure_density(product_state(pattern_or_ground(c), mode));
  const auto res = evolve_master_equation(c, rho0, grid, mode);
  const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(res.rydberg.rows(), res.rydberg.cols());
  write_populations_csv(rec.file("populations.csv"), grid, res.rydberg, zeros);
  write_concentration_csv(rec.file("concentration.csv"), grid, concentration(res.rydberg),
                          Eigen::VectorXd::Zero(res.rydberg.rows()));
  rec.residual("max_trace_error", res.max_trace_error);
  rec.residual("max_hermiticity_error", res.max_hermiticity_error);
  rec.residual("min_eigenvalue", res.min_eigenvalue);
  rec.summary("steps_accepted", static_cast<double>(res.steps_accepted));
}

void cmd_evolve_mcwf(OptionReader& opt, const SystemConfig& c, RunRecorder& rec) {
  opt.finish();
  const auto grid = uniform_grid(c.t_max, c.n_samples);
  const std::string pattern = pattern_or_ground(c);
  EnsembleAccumulator acc;
  CsvWriter jumps(rec.file("jumps.csv"), {"trajectory", "time", "site"});
  std::vector<TrajectoryRecord> period_records;
  double pruned = 0.0;
  for_each_trajectory(c, pattern, grid, 0, c.n_traj, [&](TrajectoryRecord&& r) {
    acc.add(r);
    write_jump_rows(jumps, r);
    pruned = std::max(pruned, r.pruned_weight);
    r.samples.resize(0, 0);
    r.jumps.clear();
    period_records.push_back(std::move(r));
  });
  jumps.close();
  const auto avg = acc.result();
  write_populations_csv(rec.file("populations.csv"), grid, avg.mean, avg.std_error);
  write_concentration_csv(rec.file("concentration.csv"), grid, avg.concentration, avg.concentration_error);
  rec.seed(c.seed);
  rec.residual("max_pruned_weight", pruned);
  try {
    const auto stats = bright_dark_statistics(period_records);
    rec.summary("dark_period_rate", stats.gamma_down.rate);
    rec.summary("bright_period_rate", stats.gamma_up.rate);
  } catch (const InsufficientDataError&) {
    // no completed periods; nothing to summarize
  }
}

void cmd_cluster(OptionReader& opt, const SystemConfig& c, RunRecorder& rec) {
  const bool compare = opt.flag("compare_full", c.n_sites <= 12);
  const std::string boundary_name = opt.str("boundary", "open");
  opt.finish();
  const Boundary boundary = boundary_name == "periodic" ? Boundary::periodic : Boundary::open;
  if (boundary_name != "open" && boundary_name != "periodic") throw ConfigError("boundary must be open or periodic");
  std::string pattern = c.initial_pattern;
  if (pattern.empty()) {
    pattern.assign(static_cast<std::size_t>(c.n_sites), 'g');
    pattern[static_cast<std::size_t>(c.n_sites / 2)] = 'r';
  }
  const auto basis = enumerate_subspace(c.n_sites, pattern, boundary);
  const auto h = build_reduced_hamiltonian(basis, c.omega_r);
  const auto e = spectrum(h);
  {
    CsvWriter w(rec.file("spectrum.csv"), {"index", "energy"});
    for (Eigen::Index k = 0; k < e.size(); ++k) {
      w.field(static_cast<long long>(k)).field(e(k));
      w.end_row();
    }
  }
  const auto dark = dark_states(h);
  {
    std::vector<std::string> header{"state", "pattern"};
    for (int k = 0; k < dark.count; ++k) header.push_back("dark_" + std::to_string(k));
    CsvWriter w(rec.file("dark_states.csv"), header);
    for (std::size_t a = 0; a < basis.size(); ++a) {
      w.field(static_cast<long long>(a)).field(basis.pattern(static_cast<int>(a)));
      for (int k = 0; k < dark.count; ++k) w.field(dark.vectors(static_cast<Eigen::Index>(a), k));
      w.end_row();
    }
  }
  const auto grid = uniform_grid(c.t_max, c.n_samples);
  const auto red = evolve_reduced(h, pattern, grid);
  std::vector<std::string> header{"time", "r_reduced"};
  FullEvolution full;
  if (compare) {
    SystemConfig fc = c;
    fc.boundary = boundary;
    full = evolve_full_two_level(fc, pattern, grid, &basis);
    header.push_back("r_full");
    header.push_back("leakage");
  }
  CsvWriter w(rec.file("reduced_evolution.csv"), header);
  double max_diff = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    w.field(grid[k]).field(red.concentration(row));
    if (compare) {
      w.field(full.concentration(row)).field(full.leakage(row));
      max_diff = std::max(max_diff, std::abs(full.concentration(row) - red.concentration(row)));
    }
    w.end_row();
  }
  rec.summary("dimension", static_cast<double>(basis.size()));
  rec.summary("dark_states", dark.count);
  if (compare) rec.summary("max_full_reduced_difference", max_diff);
}

void cmd_kcm(OptionReader& opt, const SystemConfig& c, RunRecorder& rec) {
  KcmParams params;
  params.constraint = parse_constraint(opt.str("constraint", "one_sfm"));
  if (opt.has("beta")) {
    params.d_eq = equilibrium_concentration(opt.num("beta", 0.0), opt.num("K", 1.0));
  } else {
    params.d_eq = opt.num("d_eq", driven_deq(c.omega_e, c.gamma_e));
    opt.num("K", 1.0);
  }
  const bool exact = opt.flag("exact", c.n_sites <= 10);
  opt.finish();
  std::string pattern = c.initial_pattern;
  if (pattern.empty()) {
    pattern.assign(static_cast<std::size_t>(c.n_sites), 'g');
    pattern[0] = 'r';
  }
  const SpinConfig initial = SpinConfig::from_pattern(pattern, c.boundary);
  const auto grid = uniform_grid(c.t_max, c.n_samples);
  EnsembleAccumulator acc;
  CsvWriter events(rec.file("events.csv"), {"run", "time", "site"});
  for (int k = 0; k < c.n_traj; ++k) {
    const auto traj = simulate_ctmc(initial, params, c.t_max, c.seed, static_cast<std::uint64_t>(k));
    for (const auto& ev : traj.events) {
      events.field(k).field(ev.time).field(ev.site);
      events.end_row();
    }
    // Occupations on the output grid.
    Eigen::MatrixXd samples(static_cast<Eigen::Index>(grid.size()), c.n_sites);
    SpinConfig s = initial;
    std::size_t next = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      while (next < traj.events.size() && traj.events[next].time <= grid[g]) {
        s.bits[static_cast<std::size_t>(traj.events[next].site)] ^= 1u;
        ++next;
      }
      for (int i = 0; i < c.n_sites; ++i) samples(static_cast<Eigen::Index>(g), i) = s.bits[static_cast<std::size_t>(i)];
    }
    acc.add(grid, samples);
  }
  events.close();
  const auto avg = acc.result();
  std::vector<std::string> header{"time", "density", "stderr"};
  std::vector<Eigen::VectorXd> dist;
  if (exact) {
    Eigen::VectorXd p0 = Eigen::VectorXd::Zero(Eigen::Index{1} << c.n_sites);
    p0(static_cast<Eigen::Index>(initial.index())) = 1.0;
    dist = exact_rate_equation(p0, c.n_sites, c.boundary, params, grid);
    header.push_back("density_exact");
    rec.residual("detailed_balance", detailed_balance_residual(c.n_sites, c.boundary, params));
  }
  CsvWriter w(rec.file("density.csv"), header);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto row = static_cast<Eigen::Index>(g);
    w.field(grid[g]).field(avg.concentration(row)).field(avg.concentration_error(row));
    if (exact) {
      double d = 0.0;
      for (Eigen::Index m = 0; m < dist[g].size(); ++m) {
        d += dist[g](m) * std::popcount(static_cast<std::uint64_t>(m));
      }
      w.field(d / c.n_sites);
    }
    w.end_row();
  }
  rec.seed(c.seed);
  rec.summary("d_eq", params.d_eq);
}

void cmd_disorder(OptionReader& opt, const SystemConfig& c, RunRecorder& rec) {
  opt.finish();
  const auto grid = uniform_grid(c.t_max, c.n_samples);
  const auto plan = disorder_plan(c);
  const auto res = disorder_average(c, pattern_or_ground(c), grid, plan);
  write_populations_csv(rec.file("populations.csv"), grid, res.pooled.mean, res.pooled.std_error);
  write_concentration_csv(rec.file("concentration.csv"), grid, res.pooled.concentration,
                          res.pooled.concentration_error);
  {
    CsvWriter w(rec.file("detunings.csv"), {"realization", "site", "detuning"});
    for (std::size_t j = 0; j < res.detunings.size(); ++j) {
      for (std::size_t i = 0; i < res.detunings[j].size(); ++i) {
        w.field(j).field(i).field(res.detunings[j][i]);
        w.end_row();
      }
    }
  }
  {
    CsvWriter w(rec.file("realizations.csv"), {"realization", "time", "r", "stderr"});
    for (std::size_t j = 0; j < res.realizations.size(); ++j) {
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        w.field(j).field(grid[k]).field(res.realizations[j].concentration(row))
            .field(res.realizations[j].concentration_error(row));
        w.end_row();
      }
    }
  }
  const auto relax = relaxation_time(grid, res.pooled.concentration);
  rec.summary("relaxation_time", relax.time);
  rec.summary("plateau", relax.plateau);
  rec.seed(c.seed);
}

}  // namespace

void write_populations_csv(const std::filesystem::path& path, const std::vector<double>& times,
                           const Eigen::MatrixXd& mean, const Eigen::MatrixXd& std_error) {
  CsvWriter w(path, {"time", "site", "R", "stderr"});
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (Eigen::Index i = 0; i < mean.cols(); ++i) {
      const auto row = static_cast<Eigen::Index>(k);
      w.field(times[k]).field(static_cast<long long>(i)).field(mean(row, i)).field(std_error(row, i));
      w.end_row();
    }
  }
}

void write_concentration_csv(const std::filesystem::path& path, const std::vector<double>& times,
                             const Eigen::VectorXd& r, const Eigen::VectorXd& std_error) {
  CsvWriter w(path, {"time", "r", "stderr"});
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    w.field(times[k]).field(r(row)).field(std_error(row));
    w.end_row();
  }
}

std::vector<std::string> command_names() {
  return {"rates", "evolve-me", "evolve-mcwf", "cluster", "kcm", "disorder", "figure"};
}

RunManifest run_command(const std::string& command, const Options& options, const SystemConfig& config,
                        const std::filesystem::path& out_dir) {
  validate(config);
  RunRecorder rec(command, options, config, out_dir);
  OptionReader opt(options, command);
  if (command == "rates") {
    cmd_rates(opt, config, rec);
  } else if (command == "evolve-me") {
    cmd_evolve_me(opt, config, rec);
  } else if (command == "evolve-mcwf") {
    cmd_evolve_mcwf(opt, config, rec);
  } else if (command == "cluster") {
    cmd_cluster(opt, config, rec);
  } else if (command == "kcm") {
    cmd_kcm(opt, config, rec);
  } else if (command == "disorder") {
    cmd_disorder(opt, config, rec);
  } else if (command == "figure") {
    const std::string id = opt.str("id", "");
    opt.finish();
    if (id.empty()) throw ConfigError("figure needs id=<figure id>");
    detail::run_figure(id, config, rec);
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return rec.finish();
}

}  // namespace rydkcm
