#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "rydkcm/errors.hpp"
#include "rydkcm/kcm.hpp"
#include "rydkcm/parallel.hpp"
#include "rydkcm/single_atom.hpp"

using namespace rydkcm;

namespace {

KcmParams sfm(double d) { return KcmParams{d, Constraint::one_sfm}; }
KcmParams free_spins(double d) { return KcmParams{d, Constraint::unconstrained}; }

std::vector<double> grid(std::initializer_list<double> t) { return std::vector<double>(t); }

Eigen::VectorXd delta_distribution(int n, std::uint64_t index) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(1 << n);
  p(index) = 1;
  return p;
}

}  // namespace

TEST(Kcm, Energy) {
  EXPECT_EQ(energy(SpinConfig::from_pattern("0000000000")), 0.0);
  EXPECT_EQ(energy(SpinConfig::from_pattern("1001000100")), 3.0);
  EXPECT_EQ(energy(SpinConfig::from_pattern("0100"), 2.0), 2.0);
  EXPECT_EQ(SpinConfig::from_pattern("grrg").pattern(), "0110");
  EXPECT_EQ(SpinConfig::from_pattern("1000").index(), 8u);
  EXPECT_EQ(SpinConfig::from_index(5, 4, Boundary::open).pattern(), "0101");
}

TEST(Kcm, EquilibriumConcentration) {
  EXPECT_EQ(equilibrium_concentration(0.0), 0.5);
  EXPECT_LT(equilibrium_concentration(800.0), 1e-300);
  EXPECT_NEAR(equilibrium_concentration(std::log(3.0)), 0.25, 1e-15);
  EXPECT_NEAR(equilibrium_concentration(1.0, std::log(3.0)), 0.25, 1e-15);
  const auto p = KcmParams::from_temperature(std::log(3.0), 1.0, Constraint::one_sfm);
  EXPECT_NEAR(p.d_eq, 0.25, 1e-15);
}

TEST(Kcm, FlipRates) {
  const auto p = sfm(0.25);
  EXPECT_EQ(flip_rate(SpinConfig::from_pattern("000"), 1, p), 0.0);
  EXPECT_EQ(flip_rate(SpinConfig::from_pattern("100"), 1, p), 0.25);
  EXPECT_EQ(flip_rate(SpinConfig::from_pattern("111"), 1, p), 1.5);
  EXPECT_EQ(flip_rate(SpinConfig::from_pattern("010"), 1, free_spins(0.25)), 0.75);
  EXPECT_EQ(flip_rate(SpinConfig::from_pattern("000"), 1, free_spins(0.25)), 0.25);
  // Ring versus open chain at the edge.
  EXPECT_EQ(flip_rate(SpinConfig::from_pattern("0001", Boundary::periodic), 0, p), 0.25);
  EXPECT_EQ(flip_rate(SpinConfig::from_pattern("0001", Boundary::open), 0, p), 0.0);
  EXPECT_THROW(flip_rate(SpinConfig::from_pattern("0001"), 4, p), ArgumentError);
}

TEST(Kcm, DrivenConcentration) {
  EXPECT_EQ(driven_deq(1.0), 0.25);
  EXPECT_EQ(driven_deq(0.0), 0.5);
  EXPECT_LT(driven_deq(1e6), 1e-12);
  for (double oe : {0.3, 1.0, 2.0}) {
    const auto s = bloch_steady_state(oe, 1e-4);
    EXPECT_NEAR(driven_deq(oe), s.rho_rr, 1e-6);
    EXPECT_NEAR(driven_deq(oe), s.rho_rr_numeric, 1e-6);
  }
}

TEST(Kcm, DetailedBalance) {
  for (auto c : {Constraint::one_sfm, Constraint::unconstrained}) {
    for (auto b : {Boundary::periodic, Boundary::open}) {
      for (int n = 2; n <= 10; ++n) {
        EXPECT_LT(detailed_balance_residual(n, b, KcmParams{0.2, c}), 1e-15) << n;
      }
    }
  }
  // Independent pairwise check on N = 6 straight from flip_rate.
  const int n = 6;
  const auto p = sfm(0.3);
  const auto pi = boltzmann_distribution(n, 0.3);
  for (std::uint64_t m = 0; m < (1u << n); ++m) {
    for (int i = 0; i < n; ++i) {
      const auto a = SpinConfig::from_index(m, n, Boundary::periodic);
      auto b = a;
      b.bits[i] ^= 1u;
      EXPECT_NEAR(flip_rate(a, i, p) * pi(m), flip_rate(b, i, p) * pi(b.index()), 1e-15);
    }
  }
}

TEST(Kcm, GeneratorConservesProbabilityAndIsStationaryAtBoltzmann) {
  for (auto c : {Constraint::one_sfm, Constraint::unconstrained}) {
    const auto q = Eigen::MatrixXd(kcm_generator(7, Boundary::periodic, KcmParams{0.25, c}));
    EXPECT_LT(q.colwise().sum().cwiseAbs().maxCoeff(), 1e-14);
    const auto pi = boltzmann_distribution(7, 0.25);
    EXPECT_NEAR(pi.sum(), 1.0, 1e-14);
    EXPECT_LT((q * pi).cwiseAbs().maxCoeff(), 1e-10);
    const auto later = exact_rate_equation(pi, 7, Boundary::periodic, KcmParams{0.25, c}, grid({0, 5, 50}));
    EXPECT_LT((later.back() - pi).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Kcm, AllZeroStateIsAbsorbing) {
  const auto traj = simulate_ctmc(SpinConfig::from_pattern("00000"), sfm(0.25), 100.0, 1);
  EXPECT_TRUE(traj.events.empty());
  EXPECT_TRUE(traj.absorbed);
  EXPECT_EQ(traj.time_averaged_density(), 0.0);
  const auto p = exact_rate_equation(delta_distribution(5, 0), 5, Boundary::periodic, sfm(0.25), grid({0, 1, 10}));
  for (const auto& v : p) EXPECT_NEAR(v(0), 1.0, 1e-12);
  const auto q = Eigen::MatrixXd(kcm_generator(5, Boundary::periodic, sfm(0.25)));
  EXPECT_EQ(q.col(0).cwiseAbs().sum(), 0.0);
  // Unconstrained: the empty state relaxes.
  const auto u = simulate_ctmc(SpinConfig::from_pattern("00000"), free_spins(0.25), 100.0, 1);
  EXPECT_FALSE(u.events.empty());
}

TEST(Kcm, TwoSitesUnconstrainedRelaxIndependently) {
  const double d = 0.2;
  const auto times = grid({0, 0.3, 1, 2.5});
  // Start in "10".
  const auto p = exact_rate_equation(delta_distribution(2, 2), 2, Boundary::open, free_spins(d), times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double e = std::exp(-times[k]);
    const double p0 = d + (1 - d) * e;  // site 0 started up
    const double p1 = d - d * e;        // site 1 started down
    EXPECT_NEAR(p[k](3), p0 * p1, 1e-12);
    EXPECT_NEAR(p[k](2), p0 * (1 - p1), 1e-12);
    EXPECT_NEAR(p[k](1), (1 - p0) * p1, 1e-12);
    EXPECT_NEAR(p[k](0), (1 - p0) * (1 - p1), 1e-12);
    EXPECT_NEAR(p[k].sum(), 1.0, 1e-12);
    EXPECT_GE(p[k].minCoeff(), 0.0);
  }
}

TEST(Kcm, ExactSolverSizeCap) {
  EXPECT_THROW(exact_rate_equation(delta_distribution(1, 0), kMaxExactKcmSites + 1, Boundary::open, sfm(0.25),
                                   grid({0, 1})),
               DimensionError);
}

TEST(Kcm, CtmcIsDeterministicAndOrdered) {
  const auto init = SpinConfig::from_pattern("0100010000");
  const auto a = simulate_ctmc(init, sfm(0.25), 200.0, 9, 3);
  const auto b = simulate_ctmc(init, sfm(0.25), 200.0, 9, 3);
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t k = 0; k < a.events.size(); ++k) {
    EXPECT_EQ(a.events[k].time, b.events[k].time);
    EXPECT_EQ(a.events[k].site, b.events[k].site);
    if (k > 0) {
      EXPECT_GE(a.events[k].time, a.events[k - 1].time);
    }
  }
  EXPECT_EQ(a.final_state.bits, b.final_state.bits);
  EXPECT_EQ(a.state_at(200.0).bits, a.final_state.bits);
  EXPECT_EQ(a.state_at(0.0).bits, init.bits);
}

TEST(Kcm, CtmcMatchesExactDistribution) {
  const int n = 4, runs = 10000;
  const auto p = sfm(0.25);
  const auto init = SpinConfig::from_pattern("1000");
  const auto times = grid({1.0, 10.0});
  const auto exact = exact_rate_equation(delta_distribution(n, init.index()), n, Boundary::periodic, p, times);
  std::vector<std::vector<std::uint64_t>> hits(times.size(), std::vector<std::uint64_t>(1 << n, 0));
  std::vector<CtmcTrajectory> trajs(runs);
  parallel_for(runs, [&](std::size_t r) { trajs[r] = simulate_ctmc(init, p, 10.0, 2024, r); });
  for (const auto& t : trajs)
    for (std::size_t k = 0; k < times.size(); ++k) ++hits[k][t.state_at(times[k]).index()];
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (int s = 0; s < (1 << n); ++s) {
      const double q = exact[k](s);
      const double sigma = std::sqrt(q * (1 - q) / runs);
      EXPECT_NEAR(static_cast<double>(hits[k][s]) / runs, q, 4 * sigma + 1e-12) << "t=" << times[k] << " s=" << s;
    }
  }
}

TEST(Kcm, UnconstrainedTimeAverageApproachesDeq) {
  const int n = 20;
  const double d = 0.25, t_max = 5000;
  std::string zeros(n, '0');
  const auto traj = simulate_ctmc(SpinConfig::from_pattern(zeros), free_spins(d), t_max, 17);
  // Each site decorrelates at rate 1: variance 2 d (1 - d) / (N T).
  const double sigma = std::sqrt(2 * d * (1 - d) / (n * t_max));
  EXPECT_NEAR(traj.time_averaged_density(), d, 3 * sigma + 1.0 / t_max);
}

TEST(Kcm, SingleDefectDiffuses) {
  const int n = 61, runs = 2000;
  const double d = 0.05, t = 200;
  std::string init(n, '0');
  init[n / 2] = '1';
  const auto start = SpinConfig::from_pattern(init, Boundary::open);
  std::vector<double> disp(runs, 0.0);
  parallel_for(runs, [&](std::size_t r) {
    const auto traj = simulate_ctmc(start, sfm(d), t, 77, r);
    disp[r] = defect_center(traj.final_state) - n / 2;
  });
  double var = 0;
  for (double x : disp) var += x * x;
  var /= runs;
  EXPECT_NEAR(var, d * t, 0.15 * d * t);
  EXPECT_TRUE(std::isnan(defect_center(SpinConfig::from_pattern("000", Boundary::open))));
  EXPECT_EQ(defect_center(SpinConfig::from_pattern("0110", Boundary::open)), 1.5);
}

TEST(Kcm, ConstraintNames) {
  EXPECT_EQ(parse_constraint("one_sfm"), Constraint::one_sfm);
  EXPECT_EQ(parse_constraint(to_string(Constraint::unconstrained)), Constraint::unconstrained);
  EXPECT_THROW(parse_constraint("two_sfm"), ConfigError);
}
