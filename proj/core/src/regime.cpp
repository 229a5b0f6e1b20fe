#include "rydkcm/regime.hpp"

#include <cmath>

#include "rydkcm/errors.hpp"

namespace rydkcm {

namespace {

std::string fmt(double x) { return format_double(x); }

// a << b with the configured margin.
bool much_less(double a, double b) { return kRegimeMargin * a <= b; }

}  // namespace

std::vector<RegimeWarning> validate_regime(const SystemConfig& c) {
  std::vector<RegimeWarning> out;
  const double g = c.gamma_e;
  const double oe = c.omega_e;
  const double orr = c.omega_r;
  const double d = c.delta_r;

  const double poly = 4 * d * d * g * g + (oe * oe - 4 * d * d) * (oe * oe - 4 * d * d);
  const double stimulated = poly > 0 ? oe * oe * orr * orr * g / poly : 0.0;
  if (c.gamma_r > 0 && !much_less(c.gamma_r, stimulated)) {
    out.push_back({"rydberg_decay", "gamma_r = " + fmt(c.gamma_r) +
                                        " is not negligible against the stimulated rate " + fmt(stimulated)});
  }

  const double jump_bound = poly / (g * g + 4 * d * d);
  if (orr != 0 && !much_less(orr * orr, jump_bound)) {
    out.push_back({"quantum_jumps", "omega_r^2 = " + fmt(orr * orr) + " is not << " + fmt(jump_bound)});
  }
  if (orr != 0 && !much_less(std::abs(orr), oe * oe / g)) {
    out.push_back({"jump_separation",
                   "omega_r = " + fmt(orr) + " is not << omega_e^2/gamma_e = " + fmt(oe * oe / g)});
  }

  const double ad = std::abs(d);
  if (!much_less(std::abs(oe), ad)) {
    out.push_back({"detuning_vs_omega_e", "|delta_r| = " + fmt(ad) + " is not >> omega_e = " + fmt(oe)});
  }
  if (orr != 0 && !much_less(std::abs(orr), ad)) {
    out.push_back({"detuning_vs_omega_r", "|delta_r| = " + fmt(ad) + " is not >> omega_r = " + fmt(orr)});
  }
  if (!much_less(g, ad)) {
    out.push_back({"detuning_vs_gamma", "|delta_r| = " + fmt(ad) + " is not >> gamma_e = " + fmt(g)});
  }
  if (c.n_sites > 1 && c.interaction_strength != d) {
    out.push_back({"anti_blockade", "V = " + fmt(c.interaction_strength) + " differs from delta_r = " + fmt(d)});
  }
  return out;
}

double effective_detuning(int ell, double delta_r, double interaction) {
  if (ell < 0 || ell > 2) throw ArgumentError("ell must be 0, 1 or 2");
  return delta_r - ell * interaction;
}

int rydberg_neighbors(const std::vector<std::uint8_t>& occ, int site, Boundary boundary) {
  const int n = static_cast<int>(occ.size());
  if (site < 0 || site >= n) throw ArgumentError("site index out of range");
  if (n == 1) return 0;
  int ell = 0;
  auto read = [&](int j) {
    if (boundary == Boundary::open && (j < 0 || j >= n)) return 0;
    return occ[static_cast<std::size_t>((j + n) % n)] ? 1 : 0;
  };
  ell += read(site - 1);
  // A periodic ring of two sites has one distinct neighbor.
  if (!(boundary == Boundary::periodic && n == 2)) ell += read(site + 1);
  return ell;
}

Species classify_species(const std::vector<std::uint8_t>& occ, int site, Boundary boundary) {
  const int ell = rydberg_neighbors(occ, site, boundary);
  if (occ[static_cast<std::size_t>(site)]) return Species::defect;
  if (ell == 1) return Species::facilitated;
  if (ell == 2) return Species::blocked;
  return Species::non_facilitated;
}

}  // namespace rydkcm
