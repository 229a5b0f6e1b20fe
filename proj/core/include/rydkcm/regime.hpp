#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rydkcm/config.hpp"

namespace rydkcm {

struct RegimeWarning {
  std::string code;
  std::string message;
};

/// Ratio used to turn "much smaller/larger than" into a numeric check.
inline constexpr double kRegimeMargin = 10.0;

/// Advisory checks of the approximations the model relies on. Never throws.
/// Codes: rydberg_decay, quantum_jumps, jump_separation, detuning_vs_omega_e,
/// detuning_vs_omega_r, detuning_vs_gamma, anti_blockade.
std::vector<RegimeWarning> validate_regime(const SystemConfig& config);

/// Detuning seen by an atom with `ell` Rydberg nearest neighbors: delta_r - ell*V.
double effective_detuning(int ell, double delta_r, double interaction);

/// Number of Rydberg nearest neighbors of `site` (0..2). Missing neighbors on
/// an open chain count as non-Rydberg.
int rydberg_neighbors(const std::vector<std::uint8_t>& occupations, int site, Boundary boundary);

Species classify_species(const std::vector<std::uint8_t>& occupations, int site, Boundary boundary);

}  // namespace rydkcm
