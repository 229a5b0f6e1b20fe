#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rydkcm {

enum class Boundary { periodic, open };
enum class Potential { nearest_neighbor, van_der_waals, dipolar };

// Single-atom levels. The numeric value is the basis index used by every
// matrix builder: g=0, e=1, r=2.
enum class AtomLevel : std::uint8_t { g = 0, e = 1, r = 2 };

enum class Species { defect, facilitated, non_facilitated, blocked };

// Trajectory stepping scheme.
//   fixed        -- per-step jump draw with probability gamma_e <e_i> dt
//   waiting_time -- jump when the decaying norm crosses a uniform threshold
enum class McwfMode { fixed, waiting_time };

/// All physical and numerical parameters of a run. Frequencies are in units
/// of gamma_e and times in units of 1/gamma_e.
struct SystemConfig {
  int n_sites = 1;
  double omega_e = 1.0;
  double omega_r = 0.03;
  double delta_r = 0.0;
  double interaction_strength = 0.0;  // V
  double gamma_e = 1.0;
  double gamma_r = 0.0;
  Boundary boundary = Boundary::periodic;
  Potential potential = Potential::nearest_neighbor;
  int potential_cutoff = 0;  // 0 selects the default for `potential`
  double disorder_amplitude = 0.0;
  std::optional<std::vector<double>> random_detunings;
  double time_step = 1e-2;
  double t_max = 1e3;
  int n_traj = 1;
  int n_rnd = 1;
  std::uint64_t seed = 0;

  // Run options shared by the engines and the CLI.
  std::string initial_pattern;  // one of g/e/r per site, e.g. "rggggrgggg"
  int n_samples = 1000;         // output grid points, including t = 0
  McwfMode mcwf_mode = McwfMode::fixed;
  double prune_threshold = 0.0;  // 0 keeps every Rydberg sector (exact)
  bool record_jumps = true;

  /// Neighbor range actually used by the interaction sum.
  int effective_cutoff() const;
  /// Detuning offset of site i (0 when no random detunings are set).
  double site_detuning(int i) const;
};

/// Throws ConfigError when an invariant of SystemConfig is violated.
void validate(const SystemConfig& config);

/// Parses the line-oriented `key = value` format. `#` starts a comment,
/// vectors are comma separated. Unknown keys are an error.
SystemConfig parse_config(std::string_view text);
SystemConfig load_config(const std::filesystem::path& path);

/// Applies the assignments of a config text on top of `config` (no validation).
void apply_config_text(SystemConfig& config, std::string_view text);
std::string read_config_file(const std::filesystem::path& path);

/// Applies one `key=value` assignment (same grammar as the file format).
void apply_setting(SystemConfig& config, std::string_view key, std::string_view value);

/// Ordered key/value echo of every field; feeding it back through
/// parse_config reproduces the config exactly.
std::map<std::string, std::string> to_key_values(const SystemConfig& config);
std::string to_config_text(const SystemConfig& config);

std::string_view to_string(Boundary b);
std::string_view to_string(Potential p);
std::string_view to_string(Species s);
std::string_view to_string(McwfMode m);

/// Parses a g/e/r pattern into levels; throws ConfigError on bad characters.
std::vector<AtomLevel> parse_pattern(std::string_view pattern);
/// Rydberg flags (1 for 'r') of a g/e/r pattern.
std::vector<std::uint8_t> rydberg_flags(std::string_view pattern);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double x);

}  // namespace rydkcm
