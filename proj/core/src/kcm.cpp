#include "rydkcm/kcm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "rydkcm/errors.hpp"
#include "rydkcm/random.hpp"

namespace rydkcm {

namespace {

void check_deq(double d) {
  if (!(d > 0.0 && d < 1.0)) throw ArgumentError("d_eq must lie in (0, 1)");
}

// Sum of the defect flags of the distinct nearest neighbors of `site`.
int defect_neighbors(const std::vector<std::uint8_t>& bits, int site, Boundary boundary) {
  const int n = static_cast<int>(bits.size());
  int left = site - 1, right = site + 1;
  if (boundary == Boundary::periodic) {
    left = (site + n - 1) % n;
    right = (site + 1) % n;
  }
  int count = 0;
  if (left >= 0 && left != site) count += bits[static_cast<std::size_t>(left)];
  if (right < n && right != site && right != left) count += bits[static_cast<std::size_t>(right)];
  return count;
}

double rate_of(const std::vector<std::uint8_t>& bits, int site, Boundary boundary, const KcmParams& p) {
  const bool up = bits[static_cast<std::size_t>(site)] != 0;
  double r = up ? 1.0 - p.d_eq : p.d_eq;
  if (p.constraint == Constraint::one_sfm) r *= defect_neighbors(bits, site, boundary);
  return r;
}

}  // namespace

std::string_view to_string(Constraint c) { return c == Constraint::one_sfm ? "one_sfm" : "unconstrained"; }

Constraint parse_constraint(std::string_view text) {
  if (text == "one_sfm" || text == "1sfm" || text == "fa") return Constraint::one_sfm;
  if (text == "unconstrained" || text == "none") return Constraint::unconstrained;
  throw ConfigError("unknown constraint '" + std::string(text) + "'");
}

int SpinConfig::defects() const {
  int c = 0;
  for (auto b : bits) c += b;
  return c;
}

SpinConfig SpinConfig::from_pattern(std::string_view pattern, Boundary boundary) {
  SpinConfig s;
  s.boundary = boundary;
  for (char c : pattern) {
    if (c == '1' || c == 'r') {
      s.bits.push_back(1);
    } else if (c == '0' || c == 'g') {
      s.bits.push_back(0);
    } else {
      throw ArgumentError(std::string("spin pattern character '") + c + "' is not one of 0, 1, g, r");
    }
  }
  if (s.bits.empty()) throw ArgumentError("empty spin pattern");
  return s;
}

std::string SpinConfig::pattern() const {
  std::string p;
  for (auto b : bits) p.push_back(b ? '1' : '0');
  return p;
}

std::uint64_t SpinConfig::index() const {
  if (bits.size() > 63) throw DimensionError("too many sites for a state index");
  std::uint64_t s = 0;
  for (auto b : bits) s = (s << 1) | (b ? 1u : 0u);
  return s;
}

SpinConfig SpinConfig::from_index(std::uint64_t index, int n_sites, Boundary boundary) {
  SpinConfig s;
  s.boundary = boundary;
  s.bits.resize(static_cast<std::size_t>(n_sites));
  for (int i = 0; i < n_sites; ++i) s.bits[static_cast<std::size_t>(i)] = (index >> (n_sites - 1 - i)) & 1u;
  return s;
}

KcmParams KcmParams::from_temperature(double beta, double K, Constraint constraint) {
  return {equilibrium_concentration(beta, K), constraint};
}

double energy(const SpinConfig& config, double K) { return K * config.defects(); }

double equilibrium_concentration(double beta, double K) {
  const double x = beta * K;
  if (x > 0) {
    const double e = std::exp(-x);  // stable for large beta
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

double flip_rate(const SpinConfig& config, int site, const KcmParams& params) {
  check_deq(params.d_eq);
  if (site < 0 || site >= config.size()) throw ArgumentError("site " + std::to_string(site) + " out of range");
  return rate_of(config.bits, site, config.boundary, params);
}

double driven_deq(double omega_e, double gamma_e) {
  const double g2 = gamma_e * gamma_e;
  return g2 / (2 * (g2 + omega_e * omega_e));
}

SpinConfig CtmcTrajectory::state_at(double t) const {
  SpinConfig s = initial;
  for (const auto& ev : events) {
    if (ev.time > t) break;
    s.bits[static_cast<std::size_t>(ev.site)] ^= 1u;
  }
  return s;
}

double CtmcTrajectory::time_averaged_density() const {
  if (!(t_max > 0.0)) return initial.size() ? static_cast<double>(initial.defects()) / initial.size() : 0.0;
  double area = 0.0, last = 0.0;
  SpinConfig s = initial;
  int defects = s.defects();
  for (const auto& ev : events) {
    area += defects * (ev.time - last);
    last = ev.time;
    auto& b = s.bits[static_cast<std::size_t>(ev.site)];
    b ^= 1u;
    defects += b ? 1 : -1;
  }
  area += defects * (t_max - last);
  return area / (t_max * initial.size());
}

CtmcTrajectory simulate_ctmc(const SpinConfig& initial, const KcmParams& params, double t_max, std::uint64_t seed,
                             std::uint64_t stream) {
  check_deq(params.d_eq);
  if (!(t_max >= 0.0)) throw ArgumentError("t_max must be non-negative");
  if (initial.bits.empty()) throw ArgumentError("empty spin configuration");
  CtmcTrajectory out;
  out.initial = initial;
  out.t_max = t_max;
  SpinConfig s = initial;
  const int n = s.size();
  std::vector<double> rates(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rates[static_cast<std::size_t>(i)] = rate_of(s.bits, i, s.boundary, params);
  Rng rng = make_rng(seed, stream, 0);
  double t = 0.0;
  while (true) {
    double total = 0.0;
    for (double r : rates) total += r;
    if (!(total > 0.0)) {
      out.absorbed = true;
      break;
    }
    t += -std::log(uniform_open0(rng)) / total;
    if (t > t_max) break;
    double u = uniform01(rng) * total;
    int site = -1;
    for (int i = 0; i < n; ++i) {
      const double r = rates[static_cast<std::size_t>(i)];
      if (r <= 0.0) continue;
      site = i;
      if (u < r) break;
      u -= r;
    }
    s.bits[static_cast<std::size_t>(site)] ^= 1u;
    out.events.push_back({t, site});
    for (int d = -1; d <= 1; ++d) {
      int j = site + d;
      if (s.boundary == Boundary::periodic) j = (j + n) % n;
      if (j < 0 || j >= n) continue;
      rates[static_cast<std::size_t>(j)] = rate_of(s.bits, j, s.boundary, params);
    }
  }
  out.final_state = s;
  return out;
}

Eigen::SparseMatrix<double> kcm_generator(int n_sites, Boundary boundary, const KcmParams& params) {
  check_deq(params.d_eq);
  if (n_sites < 1 || n_sites > kMaxExactKcmSites) {
    throw DimensionError("exact rate equation supports 1.." + std::to_string(kMaxExactKcmSites) + " sites");
  }
  const std::uint64_t dim = std::uint64_t{1} << n_sites;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(n_sites + 1));
  for (std::uint64_t m = 0; m < dim; ++m) {
    const SpinConfig s = SpinConfig::from_index(m, n_sites, boundary);
    double out_rate = 0.0;
    for (int i = 0; i < n_sites; ++i) {
      const double r = rate_of(s.bits, i, boundary, params);
      if (r == 0.0) continue;
      const std::uint64_t target = m ^ (std::uint64_t{1} << (n_sites - 1 - i));
      trip.emplace_back(static_cast<int>(target), static_cast<int>(m), r);
      out_rate += r;
    }
    trip.emplace_back(static_cast<int>(m), static_cast<int>(m), -out_rate);
  }
  Eigen::SparseMatrix<double> q(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  q.setFromTriplets(trip.begin(), trip.end());
  return q;
}

Eigen::VectorXd boltzmann_distribution(int n_sites, double d_eq) {
  check_deq(d_eq);
  if (n_sites < 1 || n_sites > kMaxExactKcmSites) throw DimensionError("too many sites for the exact distribution");
  const std::uint64_t dim = std::uint64_t{1} << n_sites;
  Eigen::VectorXd pi(static_cast<Eigen::Index>(dim));
  // pi(n) = d^k (1-d)^(N-k) is already normalized.
  for (std::uint64_t m = 0; m < dim; ++m) {
    const int k = std::popcount(m);
    pi(static_cast<Eigen::Index>(m)) = std::pow(d_eq, k) * std::pow(1.0 - d_eq, n_sites - k);
  }
  return pi;
}

double detailed_balance_residual(int n_sites, Boundary boundary, const KcmParams& params) {
  const Eigen::SparseMatrix<double> q = kcm_generator(n_sites, boundary, params);
  const Eigen::VectorXd pi = boltzmann_distribution(n_sites, params.d_eq);
  double worst = 0.0;
  for (Eigen::Index col = 0; col < q.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(q, col); it; ++it) {
      if (it.row() == it.col()) continue;
      // rate(col -> row) pi(col) against rate(row -> col) pi(row)
      const double forward = it.value() * pi(col);
      const double backward = q.coeff(col, it.row()) * pi(it.row());
      worst = std::max(worst, std::abs(forward - backward));
    }
  }
  return worst;
}

std::vector<Eigen::VectorXd> exact_rate_equation(const Eigen::VectorXd& initial_distribution, int n_sites,
                                                 Boundary boundary, const KcmParams& params,
                                                 const std::vector<double>& t_grid) {
  const Eigen::SparseMatrix<double> q = kcm_generator(n_sites, boundary, params);
  if (initial_distribution.size() != q.rows()) throw ArgumentError("initial distribution has the wrong length");
  if ((initial_distribution.array() < 0.0).any() || std::abs(initial_distribution.sum() - 1.0) > 1e-10) {
    throw ArgumentError("initial distribution must be non-negative and sum to 1");
  }
  double lambda = 0.0;
  for (Eigen::Index k = 0; k < q.rows(); ++k) lambda = std::max(lambda, -q.coeff(k, k));
  // Uniformized chain P = I + Q / lambda is a stochastic matrix.
  Eigen::SparseMatrix<double> p = q;
  if (lambda > 0.0) {
    p /= lambda;
    for (Eigen::Index k = 0; k < p.rows(); ++k) p.coeffRef(k, k) += 1.0;
  }
  auto advance = [&](const Eigen::VectorXd& v, double h) {
    if (lambda == 0.0 || h == 0.0) return v;
    // Split so that each piece keeps exp(-lambda h) well above underflow.
    const int pieces = std::max(1, static_cast<int>(std::ceil(lambda * h / 20.0)));
    const double hp = h / pieces;
    const double a = lambda * hp;
    Eigen::VectorXd x = v;
    for (int piece = 0; piece < pieces; ++piece) {
      Eigen::VectorXd term = x;
      double weight = std::exp(-a);
      Eigen::VectorXd acc = weight * term;
      double accumulated = weight;
      for (int k = 1; 1.0 - accumulated > 1e-16 && k < 10000; ++k) {
        term = p * term;
        weight *= a / k;
        acc += weight * term;
        accumulated += weight;
      }
      x = acc;
    }
    return x;
  };
  std::vector<Eigen::VectorXd> out;
  out.reserve(t_grid.size());
  Eigen::VectorXd x = initial_distribution;
  double t = 0.0;
  for (double tg : t_grid) {
    if (tg < t) throw ArgumentError("time grid must be non-decreasing and start at t >= 0");
    x = advance(x, tg - t);
    t = tg;
    out.push_back(x);
  }
  return out;
}

double defect_center(const SpinConfig& config) {
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < config.size(); ++i) {
    if (config.bits[static_cast<std::size_t>(i)]) {
      sum += i;
      ++count;
    }
  }
  return count ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace rydkcm
