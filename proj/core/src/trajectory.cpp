#include "rydkcm/trajectory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>

#include <unsupported/Eigen/MatrixFunctions>

#include "rydkcm/errors.hpp"
#include "rydkcm/hamiltonian.hpp"
#include "rydkcm/parallel.hpp"
#include "rydkcm/random.hpp"

namespace rydkcm {

namespace {

constexpr cplx kI{0.0, 1.0};
using Mat3 = Eigen::Matrix3cd;
using Mask = std::uint32_t;

// Sectors below this fraction of the spawn threshold are discarded.
constexpr double kDropFraction = 1e-8;
// Largest neighbor count whose propagators are tabulated.
constexpr int kMaxTabulatedNeighbors = 16;

struct SiteModel {
  int n = 0;
  double omega_e = 0, omega_r = 0, gamma = 1;
  std::vector<double> rydberg_energy;                     // -(delta_r + delta'_i)
  std::vector<std::vector<std::pair<int, double>>> nbrs;  // (j, V_ij)
  std::vector<Bond> bonds;

  explicit SiteModel(const SystemConfig& c)
      : n(c.n_sites), omega_e(c.omega_e), omega_r(c.omega_r), gamma(c.gamma_e), bonds(interaction_bonds(c)) {
    nbrs.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rydberg_energy.push_back(-(c.delta_r + c.site_detuning(i)));
    for (const Bond& b : bonds) {
      nbrs[static_cast<std::size_t>(b.i)].emplace_back(b.j, b.strength);
      nbrs[static_cast<std::size_t>(b.j)].emplace_back(b.i, b.strength);
    }
  }

  // No-jump generator of site i when its Rydberg neighbors shift |r> by w.
  Mat3 local_h(int i, double w) const {
    Mat3 h = Mat3::Zero();
    h(0, 1) = h(1, 0) = omega_e / 2;
    h(0, 2) = h(2, 0) = omega_r / 2;
    h(1, 1) = cplx(0.0, -gamma / 2);
    h(2, 2) = rydberg_energy[static_cast<std::size_t>(i)] + w;
    return h;
  }
};

// Eigendecomposition of h_i for every site and neighbor occupation, so that
// exp(-i h_i tau) costs a few flops for any tau. Filled on demand.
class SpectralCache {
 public:
  explicit SpectralCache(const SiteModel& m) : m_(&m) {
    entries_.resize(static_cast<std::size_t>(m.n));
  }

  struct Entry {
    Mat3 vectors, inverse;
    Eigen::Vector3cd values;
    bool diagonalizable = false;
    Mat3 h;
  };

  const Entry& get(int i, std::uint32_t key, double w) {
    auto& tab = entries_[static_cast<std::size_t>(i)];
    if (tab.empty()) {
      const auto deg = m_->nbrs[static_cast<std::size_t>(i)].size();
      tab.resize(std::size_t{1} << deg);
    }
    auto& slot = tab[key];
    if (!slot) {
      slot = std::make_unique<Entry>();
      slot->h = m_->local_h(i, w);
      Eigen::ComplexEigenSolver<Mat3> es(slot->h);
      if (es.info() == Eigen::Success) {
        slot->vectors = es.eigenvectors();
        slot->values = es.eigenvalues();
        Eigen::PartialPivLU<Mat3> lu(slot->vectors);
        slot->inverse = lu.inverse();
        const double cond = slot->vectors.norm() * slot->inverse.norm();
        slot->diagonalizable = std::isfinite(cond) && cond < 1e6;
      }
    }
    return *slot;
  }

 private:
  const SiteModel* m_;
  std::vector<std::vector<std::unique_ptr<Entry>>> entries_;
};

// exp(-i h_i tau) for every site and neighbor occupation, filled on demand.
class PropagatorTable {
 public:
  PropagatorTable(const SiteModel& m, SpectralCache& cache, double tau) : m_(&m), cache_(&cache), tau_(tau) {
    table_.resize(static_cast<std::size_t>(m.n));
    have_.resize(static_cast<std::size_t>(m.n));
  }

  double tau() const { return tau_; }

  const Mat3& get(int i, Mask occupation) {
    const auto& nb = m_->nbrs[static_cast<std::size_t>(i)];
    const int deg = static_cast<int>(nb.size());
    std::uint32_t key = 0;
    double w = 0.0;
    for (int k = 0; k < deg; ++k) {
      if ((occupation >> nb[static_cast<std::size_t>(k)].first) & 1u) {
        key |= 1u << k;
        w += nb[static_cast<std::size_t>(k)].second;
      }
    }
    if (deg > kMaxTabulatedNeighbors) {
      scratch_ = (-kI * tau_ * m_->local_h(i, w)).exp();
      return scratch_;
    }
    auto& tab = table_[static_cast<std::size_t>(i)];
    auto& have = have_[static_cast<std::size_t>(i)];
    if (tab.empty()) {
      tab.resize(std::size_t{1} << deg);
      have.assign(std::size_t{1} << deg, 0);
    }
    if (!have[key]) {
      const auto& e = cache_->get(i, key, w);
      if (e.diagonalizable) {
        const Eigen::Vector3cd phases = (-kI * tau_ * e.values).array().exp();
        tab[key] = e.vectors * phases.asDiagonal() * e.inverse;
      } else {
        tab[key] = (-kI * tau_ * e.h).exp();
      }
      have[key] = 1;
    }
    return tab[key];
  }

 private:
  const SiteModel* m_;
  SpectralCache* cache_;
  double tau_;
  std::vector<std::vector<Mat3>> table_;
  std::vector<std::vector<char>> have_;
  Mat3 scratch_;
};

struct Sector {
  Mask mask = 0;
  double pair_energy = 0.0;
  std::vector<cplx> amp;  // g/e amplitudes of the free sites, lowest site = bit 0
};

class SectorState {
 public:
  SectorState(const SiteModel& m, bool exact) : m_(&m), n_(m.n), full_((Mask{1} << n_) - 1) {
    slot_.assign(std::size_t{1} << n_, -1);
    if (exact) {
      for (std::size_t c = 0; c <= full_; ++c) add(static_cast<Mask>(c));
    }
  }

  std::vector<Sector>& sectors() { return sectors_; }
  const std::vector<Sector>& sectors() const { return sectors_; }
  int find(Mask c) const { return slot_[c]; }

  int add(Mask c) {
    if (slot_[c] >= 0) return slot_[c];
    Sector s;
    s.mask = c;
    s.pair_energy = interaction_energy(c, m_->bonds);
    s.amp.assign(std::size_t{1} << (n_ - std::popcount(c)), cplx(0.0, 0.0));
    sectors_.push_back(std::move(s));
    slot_[c] = static_cast<int>(sectors_.size() - 1);
    return slot_[c];
  }

  // Position of site i among the free sites of sector c.
  int local_bit(Mask c, int i) const { return std::popcount(~c & full_ & ((Mask{1} << i) - 1)); }

  void apply_site(int i, PropagatorTable& table) {
    const Mask bit = Mask{1} << i;
    for (auto& sec : sectors_) {
      const Mask c = sec.mask;
      if (c & bit) {
        if (slot_[c ^ bit] < 0) {
          const cplx urr = table.get(i, c)(2, 2);
          for (auto& a : sec.amp) a *= urr;
        }
        continue;
      }
      const Mat3& u = table.get(i, c);
      const int p = local_bit(c, i);
      const std::size_t low = (std::size_t{1} << p) - 1;
      auto& a = sec.amp;
      const std::size_t half = a.size() / 2;
      const int d = slot_[c | bit];
      if (d >= 0) {
        auto& b = sectors_[static_cast<std::size_t>(d)].amp;
        for (std::size_t idx = 0; idx < half; ++idx) {
          const std::size_t ag = ((idx >> p) << (p + 1)) | (idx & low);
          const std::size_t ae = ag | (std::size_t{1} << p);
          const cplx g = a[ag], e = a[ae], r = b[idx];
          a[ag] = u(0, 0) * g + u(0, 1) * e + u(0, 2) * r;
          a[ae] = u(1, 0) * g + u(1, 1) * e + u(1, 2) * r;
          b[idx] = u(2, 0) * g + u(2, 1) * e + u(2, 2) * r;
        }
      } else {
        // Partner configuration pruned: amplitude sent to |r> is dropped.
        for (std::size_t idx = 0; idx < half; ++idx) {
          const std::size_t ag = ((idx >> p) << (p + 1)) | (idx & low);
          const std::size_t ae = ag | (std::size_t{1} << p);
          const cplx g = a[ag], e = a[ae];
          a[ag] = u(0, 0) * g + u(0, 1) * e;
          a[ae] = u(1, 0) * g + u(1, 1) * e;
        }
      }
    }
  }

  // Symmetric sweep: sites forward for h/2, pair-energy correction, sites back.
  void step(double h, PropagatorTable& half_table) {
    for (int i = 0; i < n_; ++i) apply_site(i, half_table);
    for (auto& sec : sectors_) {
      if (sec.pair_energy == 0.0) continue;
      const cplx phase = std::polar(1.0, sec.pair_energy * h);
      for (auto& a : sec.amp) a *= phase;
    }
    for (int i = n_ - 1; i >= 0; --i) apply_site(i, half_table);
  }

  double sector_norm2(const Sector& s) const {
    double sum = 0.0;
    for (const auto& a : s.amp) sum += std::norm(a);
    return sum;
  }

  // Per-sector probabilities (unnormalized) and their total.
  double sector_weights(std::vector<double>& w) const {
    w.resize(sectors_.size());
    double total = 0.0;
    for (std::size_t s = 0; s < sectors_.size(); ++s) {
      w[s] = sector_norm2(sectors_[s]);
      total += w[s];
    }
    return total;
  }

  void scale(double f) {
    for (auto& sec : sectors_) {
      for (auto& a : sec.amp) a *= f;
    }
  }

  // Unnormalized <e_i> for all sites.
  void e_populations(std::vector<double>& pe) const {
    pe.assign(static_cast<std::size_t>(n_), 0.0);
    std::vector<int> free_sites;
    for (const auto& sec : sectors_) {
      free_sites.clear();
      for (int i = 0; i < n_; ++i) {
        if (!((sec.mask >> i) & 1u)) free_sites.push_back(i);
      }
      for (std::size_t idx = 0; idx < sec.amp.size(); ++idx) {
        const double w = std::norm(sec.amp[idx]);
        if (w == 0.0) continue;
        for (auto bits = idx; bits; bits &= bits - 1) {
          pe[static_cast<std::size_t>(free_sites[static_cast<std::size_t>(std::countr_zero(bits))])] += w;
        }
      }
    }
  }

  void jump(int i) {
    const Mask bit = Mask{1} << i;
    for (auto& sec : sectors_) {
      if (sec.mask & bit) {
        std::fill(sec.amp.begin(), sec.amp.end(), cplx(0.0, 0.0));
        continue;
      }
      const int p = local_bit(sec.mask, i);
      const std::size_t low = (std::size_t{1} << p) - 1;
      for (std::size_t idx = 0; idx < sec.amp.size() / 2; ++idx) {
        const std::size_t ag = ((idx >> p) << (p + 1)) | (idx & low);
        const std::size_t ae = ag | (std::size_t{1} << p);
        sec.amp[ag] = sec.amp[ae];
        sec.amp[ae] = 0.0;
      }
    }
  }

  // Keeps sectors above the drop threshold plus the full neighborhood of
  // sectors above the spawn threshold. Returns the discarded weight.
  double prune(double spawn) {
    std::vector<double> w;
    const double total = sector_weights(w);
    if (!(total > 0.0)) return 0.0;
    const double drop = spawn * kDropFraction;
    const std::size_t n_before = sectors_.size();
    std::vector<char> keep(n_before, 0);
    std::vector<Mask> spawning;
    for (std::size_t s = 0; s < n_before; ++s) {
      const double p = w[s] / total;
      if (p >= drop) keep[s] = 1;
      if (p >= spawn) spawning.push_back(sectors_[s].mask);
    }
    for (Mask c : spawning) {
      for (int i = 0; i < n_; ++i) {
        const Mask nb = c ^ (Mask{1} << i);
        const int s = slot_[nb];
        if (s >= 0) {
          keep[static_cast<std::size_t>(s)] = 1;
        } else {
          add(nb);
          keep.push_back(1);
        }
      }
    }
    double discarded = 0.0;
    std::size_t out = 0;
    for (std::size_t s = 0; s < sectors_.size(); ++s) {
      if (!keep[s]) {
        discarded += w[s] / total;
        slot_[sectors_[s].mask] = -1;
        continue;
      }
      if (out != s) sectors_[out] = std::move(sectors_[s]);
      slot_[sectors_[out].mask] = static_cast<int>(out);
      ++out;
    }
    sectors_.resize(out);
    return discarded;
  }

  void save(std::vector<std::vector<cplx>>& out) const {
    out.resize(sectors_.size());
    for (std::size_t s = 0; s < sectors_.size(); ++s) out[s] = sectors_[s].amp;
  }
  void restore(const std::vector<std::vector<cplx>>& in) {
    for (std::size_t s = 0; s < sectors_.size(); ++s) sectors_[s].amp = in[s];
  }

  int n_sites() const { return n_; }
  Mask full() const { return full_; }

 private:
  const SiteModel* m_;
  int n_;
  Mask full_;
  std::vector<Sector> sectors_;
  std::vector<int> slot_;
};

class Runner {
 public:
  Runner(const SystemConfig& c, const std::vector<double>& grid, std::uint64_t seed, std::uint64_t j,
         std::uint64_t k)
      : cfg_(c), grid_(grid), model_(c), state_(model_, c.prune_threshold == 0.0), rng_(make_rng(seed, j, k)) {
    rec_.seed = seed;
    rec_.realization = j;
    rec_.index = k;
    rec_.times = grid;
    rec_.samples.resize(static_cast<Eigen::Index>(grid.size()), c.n_sites);
    rec_.dark_periods.resize(static_cast<std::size_t>(c.n_sites));
    rec_.bright_periods.resize(static_cast<std::size_t>(c.n_sites));
  }

  SectorState& state() { return state_; }

  TrajectoryRecord run() {
    const double total = state_.sector_weights(weights_);
    if (std::abs(total - 1.0) > 1e-10) throw ArgumentError("initial state must be normalized");
    if (pruning()) rec_.pruned_weight += state_.prune(cfg_.prune_threshold);
    normalize();
    const int n = cfg_.n_sites;
    dark_.assign(static_cast<std::size_t>(n), 0);
    last_switch_.assign(static_cast<std::size_t>(n), 0.0);
    pending_.assign(static_cast<std::size_t>(n), -1.0);
    dwell_ = dark_dwell_time(cfg_.omega_e, cfg_.gamma_e);
    rydberg(r_);
    for (int i = 0; i < n; ++i) dark_[static_cast<std::size_t>(i)] = r_[static_cast<std::size_t>(i)] > kDarkThreshold;
    threshold_ = uniform_open0(rng_);

    double t = 0.0;
    std::size_t first = 0;
    if (grid_.front() == 0.0) {
      sample(0);
      first = 1;
    }
    for (std::size_t g = first; g < grid_.size(); ++g) {
      const double span = grid_[g] - t;
      const int m = std::max(1, static_cast<int>(std::ceil(span / cfg_.time_step - 1e-9)));
      const double h = span / m;
      if (!half_table_ || half_table_->tau() != h / 2) half_table_.emplace(model_, spectral_, h / 2);
      for (int s = 0; s < m; ++s) {
        const double t_end = (s + 1 == m) ? grid_[g] : t + h;
        if (cfg_.mcwf_mode == McwfMode::fixed) {
          fixed_step(t, h);
        } else {
          waiting_time_step(t, h);
        }
        t = t_end;
        ++rec_.steps;
        track(t);
      }
      sample(g);
    }
    return std::move(rec_);
  }

 private:
  bool pruning() const { return cfg_.prune_threshold > 0.0; }

  void normalize() {
    const double total = state_.sector_weights(weights_);
    if (!(total >= 1e-300)) throw NumericalError("wave-function norm underflow");
    state_.scale(1.0 / std::sqrt(total));
    rec_.max_sectors = std::max(rec_.max_sectors, state_.sectors().size());
  }

  // r_i of the (normalized) state.
  void rydberg(std::vector<double>& r) {
    const double total = state_.sector_weights(weights_);
    r.assign(static_cast<std::size_t>(cfg_.n_sites), 0.0);
    const auto& secs = state_.sectors();
    for (std::size_t s = 0; s < secs.size(); ++s) {
      for (Mask m = secs[s].mask; m; m &= m - 1) r[static_cast<std::size_t>(std::countr_zero(m))] += weights_[s];
    }
    for (auto& x : r) x /= total;
  }

  void sample(std::size_t g) {
    rydberg(r_);
    for (int i = 0; i < cfg_.n_sites; ++i) {
      rec_.samples(static_cast<Eigen::Index>(g), i) = std::clamp(r_[static_cast<std::size_t>(i)], 0.0, 1.0);
    }
  }

  void track(double t) {
    rydberg(r_);
    for (std::size_t i = 0; i < r_.size(); ++i) {
      const bool above = r_[i] > kDarkThreshold;
      if (dark_[i]) {
        if (above) continue;
        rec_.dark_periods[i].push_back(t - last_switch_[i]);
        dark_[i] = 0;
        last_switch_[i] = t;
        continue;
      }
      if (!above) {
        pending_[i] = -1.0;
        continue;
      }
      if (pending_[i] < 0.0) pending_[i] = t;
      if (t - pending_[i] < dwell_) continue;
      // The excursion began at pending_[i]; it is a dark period.
      rec_.bright_periods[i].push_back(pending_[i] - last_switch_[i]);
      dark_[i] = 1;
      last_switch_[i] = pending_[i];
      pending_[i] = -1.0;
    }
  }

  int choose_site(const std::vector<double>& p, double total) {
    double u = uniform01(rng_) * total;
    int last_positive = -1;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= 0.0) continue;
      last_positive = static_cast<int>(i);
      if (u < p[i]) return static_cast<int>(i);
      u -= p[i];
    }
    return last_positive;
  }

  void do_jump(int site, double t) {
    state_.jump(site);
    if (pruning()) rec_.pruned_weight += state_.prune(cfg_.prune_threshold);
    normalize();
    if (cfg_.record_jumps) rec_.jumps.push_back({t, site});
  }

  void propagate(double h, bool full_step) {
    if (full_step) {
      state_.step(h, *half_table_);
    } else {
      PropagatorTable table(model_, spectral_, h / 2);
      state_.step(h, table);
    }
  }

  void fixed_step(double t, double h) {
    state_.e_populations(pe_);
    const double total_norm = state_.sector_weights(weights_);
    double p_total = 0.0;
    for (auto& p : pe_) {
      p *= cfg_.gamma_e * h / total_norm;
      p_total += p;
    }
    if (p_total > kMaxStepJumpProbability) {
      throw StepSizeError("jump probability " + format_double(p_total) + " per step exceeds " +
                          format_double(kMaxStepJumpProbability) + "; reduce time_step");
    }
    if (uniform01(rng_) < p_total) {
      do_jump(choose_site(pe_, p_total), t + h);
      return;
    }
    propagate(h, true);
    after_propagation();
  }

  void after_propagation() {
    if (pruning()) rec_.pruned_weight += state_.prune(cfg_.prune_threshold);
    normalize();
  }

  // Jump when the no-jump norm falls below a uniform threshold; the crossing
  // time inside the step is found by log-linear interpolation.
  void waiting_time_step(double t, double h) {
    double done = 0.0;
    bool full = true;
    while (h - done > 0.0) {
      const double left = h - done;
      state_.save(saved_);
      propagate(left, full);
      const double n1 = state_.sector_weights(weights_);
      if (!(n1 >= 1e-300)) throw NumericalError("wave-function norm underflow");
      if (n1 >= threshold_) {
        threshold_ /= n1;
        after_propagation();
        return;
      }
      double tau = left * std::log(threshold_) / std::log(n1);
      tau = std::clamp(tau, 0.0, left);
      state_.restore(saved_);
      if (tau > 0.0) propagate(tau, false);
      state_.e_populations(pe_);
      double p_total = 0.0;
      for (double p : pe_) p_total += p;
      if (!(p_total > 0.0)) {
        // Norm loss came from pruning alone; continue without a jump.
        threshold_ = uniform_open0(rng_);
        after_propagation();
      } else {
        do_jump(choose_site(pe_, p_total), t + done + tau);
        threshold_ = uniform_open0(rng_);
      }
      done += tau;
      full = false;
    }
  }

  const SystemConfig& cfg_;
  const std::vector<double>& grid_;
  SiteModel model_;
  SpectralCache spectral_{model_};
  SectorState state_;
  Rng rng_;
  TrajectoryRecord rec_;
  std::optional<PropagatorTable> half_table_;
  std::vector<double> weights_, pe_, r_, last_switch_, pending_;
  double dwell_ = 0.0;
  std::vector<char> dark_;
  std::vector<std::vector<cplx>> saved_;
  double threshold_ = 1.0;
};

void check_inputs(const SystemConfig& c, const std::vector<double>& grid) {
  validate(c);
  if (c.n_sites > kMaxTrajectorySites) {
    throw DimensionError("trajectories support at most " + std::to_string(kMaxTrajectorySites) + " sites");
  }
  if (c.prune_threshold == 0.0 && hilbert_dimension(c.n_sites, HamiltonianMode::three_level) > kThreeLevelCap) {
    throw DimensionError("exact trajectories need 3^N <= 3^12; set prune_threshold > 0");
  }
  if (c.mcwf_mode == McwfMode::fixed && c.time_step * c.gamma_e > kMaxFixedStep) {
    throw PreconditionError("fixed-step trajectories need gamma_e * time_step <= " + format_double(kMaxFixedStep));
  }
  if (grid.empty() || grid.front() < 0.0) throw ArgumentError("time grid must be non-empty and start at t >= 0");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw ArgumentError("time grid must be strictly increasing");
  }
}

}  // namespace

double dark_dwell_time(double omega_e, double gamma_e) {
  // Norm decay rates of the no-jump g/e block are gamma_e/2 -+ Re sqrt(gamma_e^2/4 - omega_e^2).
  const double disc = gamma_e * gamma_e / 4 - omega_e * omega_e;
  const double kappa = gamma_e / 2 - (disc > 0.0 ? std::sqrt(disc) : 0.0);
  if (!(kappa > 0.0)) return std::numeric_limits<double>::infinity();
  return kDarkDwellFactor / kappa;
}

TrajectoryRecord run_trajectory(const SystemConfig& c, std::string_view pattern, const std::vector<double>& grid,
                                std::uint64_t seed, std::uint64_t realization, std::uint64_t index) {
  check_inputs(c, grid);
  const auto levels = parse_pattern(pattern);
  if (levels.size() != static_cast<std::size_t>(c.n_sites)) {
    throw ArgumentError("initial pattern must have n_sites characters");
  }
  Runner runner(c, grid, seed, realization, index);
  auto& st = runner.state();
  Mask mask = 0;
  std::size_t local = 0;
  int bit = 0;
  for (int i = 0; i < c.n_sites; ++i) {
    const AtomLevel l = levels[static_cast<std::size_t>(i)];
    if (l == AtomLevel::r) {
      mask |= Mask{1} << i;
    } else {
      if (l == AtomLevel::e) local |= std::size_t{1} << bit;
      ++bit;
    }
  }
  const int s = st.add(mask);
  st.sectors()[static_cast<std::size_t>(s)].amp[local] = 1.0;
  return runner.run();
}

TrajectoryRecord run_trajectory(const SystemConfig& c, const Eigen::VectorXcd& psi0, const std::vector<double>& grid,
                                std::uint64_t seed, std::uint64_t realization, std::uint64_t index) {
  check_inputs(c, grid);
  const std::size_t dim = hilbert_dimension(c.n_sites, HamiltonianMode::three_level);
  if (static_cast<std::size_t>(psi0.size()) != dim) throw DimensionError("psi0 must have 3^N entries");
  Runner runner(c, grid, seed, realization, index);
  auto& st = runner.state();
  for (std::size_t a = 0; a < dim; ++a) {
    if (psi0(static_cast<Eigen::Index>(a)) == cplx(0.0, 0.0)) continue;
    Mask mask = 0;
    std::size_t local = 0;
    int bit = 0;
    for (int i = 0; i < c.n_sites; ++i) {
      const int l = local_level(a, i, c.n_sites, HamiltonianMode::three_level);
      if (l == 2) {
        mask |= Mask{1} << i;
      } else {
        if (l == 1) local |= std::size_t{1} << bit;
        ++bit;
      }
    }
    const int s = st.add(mask);
    st.sectors()[static_cast<std::size_t>(s)].amp[local] = psi0(static_cast<Eigen::Index>(a));
  }
  return runner.run();
}

void for_each_trajectory(const SystemConfig& c, std::string_view pattern, const std::vector<double>& grid,
                         std::uint64_t realization, int n_traj, const std::function<void(TrajectoryRecord&&)>& sink) {
  if (n_traj < 1) throw ArgumentError("n_traj must be >= 1");
  const std::string pat(pattern);
  const auto chunk = static_cast<std::size_t>(std::max(1, 4 * thread_count()));
  for (std::size_t begin = 0; begin < static_cast<std::size_t>(n_traj); begin += chunk) {
    const std::size_t count = std::min(chunk, static_cast<std::size_t>(n_traj) - begin);
    std::vector<TrajectoryRecord> batch(count);
    parallel_for(count, [&](std::size_t i) {
      batch[i] = run_trajectory(c, pat, grid, c.seed, realization, begin + i);
    });
    for (auto& rec : batch) sink(std::move(rec));
  }
}

std::vector<TrajectoryRecord> run_trajectories(const SystemConfig& c, std::string_view pattern,
                                               const std::vector<double>& grid, std::uint64_t realization,
                                               int n_traj) {
  std::vector<TrajectoryRecord> out;
  out.reserve(static_cast<std::size_t>(std::max(0, n_traj)));
  for_each_trajectory(c, pattern, grid, realization, n_traj, [&](TrajectoryRecord&& r) { out.push_back(std::move(r)); });
  return out;
}

}  // namespace rydkcm
