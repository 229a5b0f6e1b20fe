#include "rydkcm/single_atom.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rydkcm/errors.hpp"

namespace rydkcm {

namespace {

constexpr double kGamma = 1.0;
constexpr cplx kI{0.0, 1.0};

double rate_denominator(double d, double oe) {
  const double g2 = kGamma * kGamma;
  return 16 * d * d * d * d + 4 * d * d * (g2 - 2 * oe * oe) + oe * oe * oe * oe;
}

void check_rate_args(double d, double oe, double orr) {
  if (!std::isfinite(d) || !std::isfinite(oe) || !std::isfinite(orr)) {
    throw ArgumentError("rate arguments must be finite");
  }
  if (!(rate_denominator(d, oe) > 0.0)) {
    throw ArgumentError("rate denominator vanishes (omega_e = 0 at zero detuning)");
  }
}

// Index of level pair (a, b) in the Bloch vector ordering.
constexpr std::array<std::pair<int, int>, 9> kBlochOrder{{
    {1, 0}, {0, 1}, {1, 1}, {0, 0}, {2, 0}, {0, 2}, {2, 2}, {1, 2}, {2, 1}}};

}  // namespace

Eigen::Matrix3cd effective_hamiltonian(double omega_e, double omega_r, double delta_r) {
  Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
  h(0, 1) = h(1, 0) = omega_e / 2;
  h(0, 2) = h(2, 0) = omega_r / 2;
  h(1, 1) = cplx(0.0, -kGamma / 2);
  h(2, 2) = -delta_r;
  return h;
}

double EffectiveEigensystem::dark_decay_rate() const { return std::abs(-2.0 * lambda[2].imag()); }

EffectiveEigensystem bw_eigensystem(double omega_e, double omega_r, double delta_r, AtomLevel initial) {
  EffectiveEigensystem es;
  const Eigen::Matrix3cd h = effective_hamiltonian(omega_e, omega_r, delta_r);
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("eigen decomposition of H_eff failed");

  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(solver.eigenvalues()(a).imag()) > std::abs(solver.eigenvalues()(b).imag());
  });
  for (int n = 0; n < 3; ++n) {
    es.lambda[n] = solver.eigenvalues()(order[n]);
    es.vectors.col(n) = solver.eigenvectors().col(order[n]).normalized();
  }

  Eigen::Vector3cd psi0 = Eigen::Vector3cd::Zero();
  psi0(static_cast<int>(initial)) = 1.0;
  const Eigen::Vector3cd c = es.vectors.fullPivLu().solve(psi0);
  for (int n = 0; n < 3; ++n) es.coefficients[n] = c(n);

  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      if (std::abs(es.lambda[a] - es.lambda[b]) < 1e-12) es.degenerate = true;
    }
  }

  const double g = kGamma;
  const double d = delta_r;
  const cplx root = std::sqrt(cplx(g * g - 4 * omega_e * omega_e, 0.0));
  es.e_minus = kI / 4.0 * (-g + root);
  es.e_plus = -kI / 4.0 * (g + root);
  const cplx half_angle = 0.5 * std::atanh(cplx(2 * omega_e / g, 0.0));
  es.omega_c = omega_r * std::cosh(half_angle);
  es.omega_s = omega_r * std::sinh(half_angle);

  // Second-order correction from the resolvent of the unperturbed g/e block.
  const cplx second_order =
      omega_r * omega_r * (kI * g - 2.0 * d) / (8.0 * d * d - 2 * omega_e * omega_e - 4.0 * kI * g * d);
  es.lambda3_perturbative = -d + second_order;
  es.c3_perturbative = omega_r * (kI * g - 2.0 * d) / (4.0 * d * d - omega_e * omega_e - 2.0 * kI * g * d);
  es.p_dark = std::norm(es.c3_perturbative);

  if (!es.degenerate) {
    const double exact = std::abs(es.lambda[2].imag());
    const double pert = std::abs(es.lambda3_perturbative.imag());
    es.perturbative_rel_error = exact > 0 ? std::abs(exact - pert) / exact : std::abs(pert);
  }
  return es;
}

double rate_up(double delta_star, double omega_e, double omega_r) {
  check_rate_args(delta_star, omega_e, omega_r);
  const double g = kGamma;
  const double d = delta_star;
  return g * omega_e * omega_e * omega_r * omega_r * (g * g + 4 * d * d) /
         ((g * g + 2 * omega_e * omega_e) * rate_denominator(d, omega_e));
}

double rate_down(double delta_star, double omega_e, double omega_r) {
  check_rate_args(delta_star, omega_e, omega_r);
  return kGamma * omega_e * omega_e * omega_r * omega_r / rate_denominator(delta_star, omega_e);
}

RatePair rates(double delta_star, double omega_e, double omega_r) {
  return {rate_up(delta_star, omega_e, omega_r), rate_down(delta_star, omega_e, omega_r)};
}

double delay_function(double t, const EffectiveEigensystem& es) {
  if (!(t >= 0.0)) throw ArgumentError("delay_function requires t >= 0");
  Eigen::Vector3cd psi = Eigen::Vector3cd::Zero();
  for (int n = 0; n < 3; ++n) psi += es.coefficients[n] * std::exp(-kI * es.lambda[n] * t) * es.vectors.col(n);
  return psi.squaredNorm();
}

double delay_function_diagonal(double t, const EffectiveEigensystem& es) {
  if (!(t >= 0.0)) throw ArgumentError("delay_function requires t >= 0");
  double sum = 0.0;
  for (int n = 0; n < 3; ++n) sum += std::norm(es.coefficients[n]) * std::exp(2.0 * t * es.lambda[n].imag());
  return sum;
}

Eigen::Matrix<cplx, 9, 9> bloch_generator(double omega_e, double omega_r, double delta_r) {
  Eigen::Matrix3cd h = effective_hamiltonian(omega_e, omega_r, delta_r);
  h(1, 1) = 0.0;  // Hermitian part only
  Eigen::Matrix3cd c = Eigen::Matrix3cd::Zero();
  c(0, 1) = 1.0;  // |g><e|
  const Eigen::Matrix3cd cdc = c.adjoint() * c;

  Eigen::Matrix<cplx, 9, 9> gen;
  for (int col = 0; col < 9; ++col) {
    Eigen::Matrix3cd rho = Eigen::Matrix3cd::Zero();
    rho(kBlochOrder[col].first, kBlochOrder[col].second) = 1.0;
    const Eigen::Matrix3cd drho = -kI * (h * rho - rho * h) +
                                  kGamma * (c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc));
    for (int row = 0; row < 9; ++row) gen(row, col) = drho(kBlochOrder[row].first, kBlochOrder[row].second);
  }
  return gen;
}

BlochSteadyState bloch_steady_state(double omega_e, double omega_r) {
  if (!std::isfinite(omega_e) || !std::isfinite(omega_r)) throw ArgumentError("Rabi frequencies must be finite");
  const auto gen = bloch_generator(omega_e, omega_r);
  Eigen::JacobiSVD<Eigen::Matrix<cplx, 9, 9>> svd(gen, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-12 * std::max(1.0, sv(0));
  int kernel_dim = 0;
  for (int k = 0; k < 9; ++k) {
    if (sv(k) < tol) ++kernel_dim;
  }
  if (kernel_dim == 0) throw DegenerateError("Bloch generator has no kernel");

  // Trace and rho_rr of each kernel basis vector.
  auto trace_of = [](const Eigen::Matrix<cplx, 9, 1>& v) { return v(2) + v(3) + v(6); };
  int best = 9 - kernel_dim;
  for (int k = 9 - kernel_dim; k < 9; ++k) {
    if (std::abs(trace_of(svd.matrixV().col(k))) > std::abs(trace_of(svd.matrixV().col(best)))) best = k;
  }
  const Eigen::Matrix<cplx, 9, 1> v_svd = svd.matrixV().col(best) / trace_of(svd.matrixV().col(best));
  const cplx rr = v_svd(6);
  bool fixed = true;
  for (int k = 9 - kernel_dim; k < 9; ++k) {
    const auto& u = svd.matrixV().col(k);
    if (std::abs(u(6) - rr * trace_of(u)) > 1e-9) fixed = false;
  }
  Eigen::Matrix<cplx, 9, 1> v = v_svd;
  if (!fixed) {
    // Numerically small but nonzero rates (e.g. omega_r ~ 1e-8): solve with the trace row instead.
    // An exactly decoupled level leaves a zero pivot.
    Eigen::Matrix<cplx, 9, 9> a = gen;
    a.row(3).setZero();
    a(3, 2) = a(3, 3) = a(3, 6) = 1.0;
    Eigen::Matrix<cplx, 9, 1> rhs = Eigen::Matrix<cplx, 9, 1>::Zero();
    rhs(3) = 1.0;
    Eigen::FullPivLU<Eigen::Matrix<cplx, 9, 9>> lu(a);
    lu.setThreshold(0.0);
    if (!lu.isInvertible()) {
      throw DegenerateError("Bloch generator kernel has dimension " + std::to_string(kernel_dim) +
                            " and does not fix rho_rr");
    }
    v = lu.solve(rhs);
  }

  BlochSteadyState out;
  const double g2 = kGamma * kGamma;
  out.rho_rr = (g2 + omega_r * omega_r) / (2 * (g2 + omega_e * omega_e + omega_r * omega_r));
  out.rho_rr_numeric = v(6).real();
  out.kernel_residual = (gen * v).norm();
  return out;
}

double estimate_rates_from_slope(const std::vector<double>& times, const std::vector<double>& rho_rr,
                                 bool initial_rydberg, const SlopeOptions& options) {
  if (times.size() != rho_rr.size()) throw ArgumentError("times and rho_rr differ in length");
  if (times.size() < 2) throw InsufficientDataError("slope estimate needs at least two points");

  double slope = 0.0;
  if (options.method == SlopeMethod::first_interval) {
    slope = (rho_rr[1] - rho_rr[0]) / (times[1] - times[0]);
  } else {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (times[k] >= options.fit_begin && times[k] <= options.fit_end) idx.push_back(k);
    }
    if (idx.size() < 3) throw InsufficientDataError("fewer than three samples in the slope fit window");
    const double scale = options.fit_end;
    Eigen::MatrixXd a(idx.size(), 3);
    Eigen::VectorXd b(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const double s = times[idx[r]] / scale;
      a(r, 0) = 1.0;
      a(r, 1) = s;
      a(r, 2) = s * s;
      b(r) = rho_rr[idx[r]];
    }
    const Eigen::Vector3d coef = a.colPivHouseholderQr().solve(b);
    slope = coef(1) / scale;
  }
  return initial_rydberg ? -slope : slope;
}

}  // namespace rydkcm
