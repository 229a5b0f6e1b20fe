#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "rydkcm/errors.hpp"
#include "rydkcm/single_atom.hpp"

using namespace rydkcm;

namespace {

constexpr double kOe = 1.0;
constexpr double kOr = 0.03;

// Closed-form rates written out independently, gamma_e = 1.
double oracle_up(double d, double oe, double orr) {
  const double den = 16 * std::pow(d, 4) + 4 * d * d * (1 - 2 * oe * oe) + std::pow(oe, 4);
  return oe * oe * orr * orr * (1 + 4 * d * d) / ((1 + 2 * oe * oe) * den);
}
double oracle_down(double d, double oe, double orr) {
  const double den = 16 * std::pow(d, 4) + 4 * d * d * (1 - 2 * oe * oe) + std::pow(oe, 4);
  return oe * oe * orr * orr / den;
}

// Row-major vectorization vec(A rho B) = (A kron B^T) vec(rho).
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

Eigen::MatrixXcd liouvillian(double oe, double orr, double d) {
  const std::complex<double> i(0, 1);
  Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
  h(0, 1) = h(1, 0) = oe / 2;
  h(0, 2) = h(2, 0) = orr / 2;
  h(2, 2) = -d;
  Eigen::Matrix3cd c = Eigen::Matrix3cd::Zero();
  c(0, 1) = 1;
  const Eigen::Matrix3cd id = Eigen::Matrix3cd::Identity();
  const Eigen::Matrix3cd cdc = c.adjoint() * c;
  return -i * (kron(h, id) - kron(id, h.transpose())) + kron(c, c.conjugate()) - 0.5 * kron(cdc, id) -
         0.5 * kron(id, cdc.transpose());
}

std::vector<double> oracle_rho_rr(double oe, double orr, double d, int start_level, const std::vector<double>& t) {
  const Eigen::MatrixXcd l = liouvillian(oe, orr, d);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(9);
  v(start_level * 3 + start_level) = 1;
  std::vector<double> out;
  Eigen::VectorXcd cur = v;
  const Eigen::MatrixXcd step = (l * (t[1] - t[0])).exp();
  for (std::size_t k = 0; k < t.size(); ++k) {
    out.push_back(cur(8).real());
    cur = step * cur;
  }
  return out;
}

}  // namespace

TEST(EffectiveHamiltonian, Layout) {
  const auto off = effective_hamiltonian(0, 0, 0);
  EXPECT_EQ(off(1, 1), std::complex<double>(0, -0.5));
  EXPECT_EQ((off - Eigen::Matrix3cd(off.diagonal().asDiagonal())).norm(), 0.0);
  const auto h = effective_hamiltonian(1.0, 0.03, 3.0);
  EXPECT_EQ(h(0, 1), std::complex<double>(0.5, 0));
  EXPECT_EQ(h(2, 2), std::complex<double>(-3, 0));
  const Eigen::Matrix3cd anti = (h - h.adjoint()) / 2.0;
  EXPECT_NEAR(std::abs(anti(1, 1) - std::complex<double>(0, -0.5)), 0, 1e-15);
  EXPECT_NEAR(anti.norm(), 0.5, 1e-15);
}

TEST(Rates, ReferenceValues) {
  EXPECT_NEAR(rate_up(0, kOe, kOr), 3.00e-4, 0.005e-4);
  EXPECT_NEAR(rate_up(3, kOe, kOr), 8.80e-6, 0.005e-6);
  EXPECT_NEAR(rate_up(-3, kOe, kOr), 8.80e-6, 0.005e-6);
  EXPECT_NEAR(rate_up(10, kOe, kOr), 7.54e-7, 0.005e-7);
  EXPECT_NEAR(rate_down(0, kOe, kOr), 9.00e-4, 0.005e-4);
  EXPECT_NEAR(rate_down(3, kOe, kOr), 7.14e-7, 0.005e-7);
  EXPECT_NEAR(rate_down(-10, kOe, kOr), 5.64e-9, 0.005e-9);
}

TEST(Rates, MatchIndependentClosedForm) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int i = 0; i < 500; ++i) {
    const double d = u(gen), oe = 0.1 + std::abs(u(gen)) / 4, orr = std::abs(u(gen)) / 100;
    EXPECT_NEAR(rate_up(d, oe, orr), oracle_up(d, oe, orr), 1e-13 * (1 + oracle_up(d, oe, orr)));
    EXPECT_NEAR(rate_down(d, oe, orr), oracle_down(d, oe, orr), 1e-13 * (1 + oracle_down(d, oe, orr)));
  }
}

TEST(Rates, ParityRatioAndResonantLimits) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-15, 15);
  double prev_ratio = 0.0;
  for (int i = 0; i < 300; ++i) {
    const double d = u(gen), oe = 0.2 + std::abs(u(gen)) / 5, orr = 0.01 + std::abs(u(gen)) / 500;
    EXPECT_DOUBLE_EQ(rate_up(d, oe, orr), rate_up(-d, oe, orr));
    EXPECT_DOUBLE_EQ(rate_down(d, oe, orr), rate_down(-d, oe, orr));
    EXPECT_NEAR(rate_up(d, oe, orr) / rate_down(d, oe, orr), (1 + 4 * d * d) / (1 + 2 * oe * oe), 1e-12 * (1 + d * d));
    EXPECT_GT(rate_up(d, oe, orr), 0.0);
    EXPECT_GT(rate_down(d, oe, orr), 0.0);
    EXPECT_NEAR(rate_down(0, oe, orr), orr * orr / (oe * oe), 1e-15);
    EXPECT_NEAR(rate_up(0, oe, orr), orr * orr / (oe * oe * (1 + 2 * oe * oe)), 1e-15);
  }
  for (double d = 0; d < 20; d += 0.5) {
    const double r = rate_up(d, kOe, kOr) / rate_down(d, kOe, kOr);
    EXPECT_GT(r, prev_ratio);
    prev_ratio = r;
  }
}

TEST(Rates, SingularAtZeroDriveAndResonance) {
  EXPECT_THROW(rate_up(0, 0, kOr), ArgumentError);
  EXPECT_THROW(rate_down(0, 0, kOr), ArgumentError);
  EXPECT_THROW(rate_down(std::nan(""), 1, kOr), ArgumentError);
}

TEST(Eigensystem, ReferenceValues) {
  const auto res = bw_eigensystem(kOe, kOr, 0.0);
  EXPECT_NEAR(res.dark_decay_rate(), 9.00e-4, 0.005e-4);
  EXPECT_NEAR(std::abs(2 * res.lambda3_perturbative.imag()), 9.00e-4, 0.005e-4);
  const auto off = bw_eigensystem(kOe, kOr, 3.0);
  EXPECT_NEAR(off.dark_decay_rate(), 7.14e-7, 0.005e-7);
  for (const auto& l : off.lambda) EXPECT_LE(l.imag(), 1e-12);
  EXPECT_LT(std::abs(off.lambda[2].imag()), 0.1 * std::abs(off.lambda[1].imag()));
}

// Only magnitudes are compared: the second-order formula carries the
// opposite sign of Im lambda_3 at resonance.
TEST(Eigensystem, PerturbativeMagnitudeAgreesWithExact) {
  for (double d : {0.0, 0.5, 1.0, 3.0, 10.0, -3.0}) {
    const auto es = bw_eigensystem(kOe, kOr, d);
    const double exact = std::abs(es.lambda[2].imag());
    EXPECT_NEAR(std::abs(es.lambda3_perturbative.imag()), exact, 0.05 * exact) << d;
    EXPECT_NEAR(es.dark_decay_rate(), rate_down(d, kOe, kOr), 0.05 * rate_down(d, kOe, kOr)) << d;
  }
}

TEST(Eigensystem, ExactEigenvaluesMatchIndependentSolver) {
  const auto h = effective_hamiltonian(kOe, kOr, 1.5);
  const auto es = bw_eigensystem(kOe, kOr, 1.5);
  for (int n = 0; n < 3; ++n) {
    EXPECT_NEAR((h * es.vectors.col(n) - es.lambda[n] * es.vectors.col(n)).norm(), 0.0, 1e-12);
  }
}

TEST(Eigensystem, UnperturbedLimit) {
  const auto es = bw_eigensystem(kOe, 0.0, 3.0);
  EXPECT_NEAR(std::abs(es.lambda[2] - std::complex<double>(-3.0, 0.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(es.vectors(2, 2)), 1.0, 1e-12);
}

TEST(DelayFunction, NormAtOriginAndDecay) {
  const auto es = bw_eigensystem(kOe, kOr, 0.0);
  EXPECT_NEAR(delay_function(0.0, es), 1.0, 1e-3);
  double prev = 2.0;
  for (double t = 0; t < 2e4; t += 50) {
    const double d = delay_function(t, es);
    EXPECT_LE(d, prev + 1e-14);
    prev = d;
  }
  const double t1 = 5000, t2 = 10000;
  const double slope = (std::log(delay_function(t2, es)) - std::log(delay_function(t1, es))) / (t2 - t1);
  EXPECT_NEAR(slope, 2 * es.lambda[2].imag(), 1e-3 * std::abs(2 * es.lambda[2].imag()));
  EXPECT_THROW(delay_function(-1.0, es), ArgumentError);
}

// D_0(t) is the squared norm of exp(-i H_eff t)|g>.
TEST(DelayFunction, MatchesMatrixExponential) {
  const auto es = bw_eigensystem(kOe, kOr, 0.0);
  const auto h = effective_hamiltonian(kOe, kOr, 0.0);
  for (double t : {0.0, 0.7, 3.0, 40.0, 900.0}) {
    const Eigen::Matrix3cd u = (std::complex<double>(0, -t) * h).exp();
    EXPECT_NEAR(delay_function(t, es), u.col(0).squaredNorm(), 1e-10) << t;
  }
}

TEST(Bloch, SteadyStateMatchesClosedFormOverSweep) {
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double oe = 0.1 + 0.3 * i, orr = 0.005 + 0.05 * j;
      const auto s = bloch_steady_state(oe, orr);
      EXPECT_NEAR(s.rho_rr_numeric, (1 + orr * orr) / (2 * (1 + oe * oe + orr * orr)), 1e-10);
      EXPECT_LT(s.kernel_residual, 1e-10);
    }
  }
  EXPECT_NEAR(bloch_steady_state(1.0, 1e-8).rho_rr, 0.25, 1e-12);
  EXPECT_NEAR(bloch_steady_state(0.0, 0.3).rho_rr, 0.5, 1e-15);
  EXPECT_NEAR(bloch_steady_state(1.0, 0.03).rho_rr, 0.2501, 1e-4);
}

TEST(Bloch, GeneratorPreservesTrace) {
  const auto gen = bloch_generator(0.8, 0.2, 0.4);
  // Populations sit at indices 2 (ee), 3 (gg), 6 (rr).
  for (int col = 0; col < 9; ++col) EXPECT_NEAR(std::abs(gen(2, col) + gen(3, col) + gen(6, col)), 0.0, 1e-15);
}

TEST(Bloch, SteadyStateMatchesLongTimeOracle) {
  const Eigen::MatrixXcd l = liouvillian(1.0, 0.3, 0.0);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(9);
  v(0) = 1;
  const Eigen::VectorXcd late = (l * 2000.0).exp() * v;
  EXPECT_NEAR(late(8).real(), bloch_steady_state(1.0, 0.3).rho_rr, 1e-8);
}

TEST(Slope, SyntheticSeries) {
  std::vector<double> t, up, down;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(k);
    up.push_back(2e-4 * k + 3e-7 * k * k);
    down.push_back(1 - 5e-4 * k + 1e-7 * k * k);
  }
  EXPECT_NEAR(estimate_rates_from_slope(t, up, false), 2e-4, 1e-15);
  EXPECT_NEAR(estimate_rates_from_slope(t, down, true), 5e-4, 1e-15);
  SlopeOptions fd;
  fd.method = SlopeMethod::first_interval;
  EXPECT_NEAR(estimate_rates_from_slope(t, up, false, fd), 2e-4 + 3e-7, 1e-15);
  EXPECT_THROW(estimate_rates_from_slope({0.0}, {0.0}, false), InsufficientDataError);
  EXPECT_THROW(estimate_rates_from_slope({0.0, 1.0}, {0.0}, false), ArgumentError);
}

TEST(Slope, ExactSeriesFromOracle) {
  std::vector<double> t;
  for (int k = 0; k <= 1000; ++k) t.push_back(0.1 * k);
  const auto from_r = oracle_rho_rr(kOe, kOr, 0.0, 2, t);
  const auto from_g = oracle_rho_rr(kOe, kOr, 0.0, 0, t);
  EXPECT_NEAR(estimate_rates_from_slope(t, from_r, true), 9.02e-4, 0.01 * 9.02e-4);
  EXPECT_NEAR(estimate_rates_from_slope(t, from_g, false), 3.0e-4, 0.01 * 3.0e-4);
  const auto dark = oracle_rho_rr(kOe, 0.0, 0.0, 0, t);
  EXPECT_NEAR(estimate_rates_from_slope(t, dark, false), 0.0, 1e-15);
}
