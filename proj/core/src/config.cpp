#include "rydkcm/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rydkcm/errors.hpp"

namespace rydkcm {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("key '" + std::string(key) + "': not a number: '" + std::string(text) + "'");
  }
  return value;
}

template <typename Int>
Int parse_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  Int value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("key '" + std::string(key) + "': not an integer: '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("key '" + std::string(key) + "': not a boolean: '" + std::string(text) + "'");
}

std::vector<double> parse_vector(std::string_view key, std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_double(key, text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool finite_all(std::initializer_list<double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

int SystemConfig::effective_cutoff() const {
  if (potential == Potential::nearest_neighbor) return 1;
  return potential_cutoff > 0 ? potential_cutoff : 3;
}

double SystemConfig::site_detuning(int i) const {
  if (!random_detunings) return 0.0;
  return (*random_detunings).at(static_cast<std::size_t>(i));
}

void validate(const SystemConfig& c) {
  if (c.n_sites < 1) throw ConfigError("n_sites must be >= 1");
  if (!finite_all({c.omega_e, c.omega_r, c.delta_r, c.interaction_strength, c.gamma_e, c.gamma_r,
                   c.disorder_amplitude, c.time_step, c.t_max, c.prune_threshold})) {
    throw ConfigError("all frequencies and times must be finite");
  }
  if (c.gamma_e != 1.0) throw ConfigError("gamma_e is the unit of frequency and must equal 1");
  if (c.gamma_r < 0.0) throw ConfigError("gamma_r must be >= 0");
  if (c.disorder_amplitude < 0.0) throw ConfigError("disorder_amplitude must be >= 0");
  if (c.potential_cutoff < 0) throw ConfigError("potential_cutoff must be >= 1");
  if (c.potential == Potential::nearest_neighbor && c.potential_cutoff > 1) {
    throw ConfigError("nearest_neighbor potential requires potential_cutoff = 1");
  }
  if (c.random_detunings) {
    if (c.random_detunings->size() != static_cast<std::size_t>(c.n_sites)) {
      throw ConfigError("random_detunings must have n_sites entries");
    }
    for (double d : *c.random_detunings) {
      if (!std::isfinite(d)) throw ConfigError("random_detunings must be finite");
    }
  }
  if (!(c.time_step > 0.0)) throw ConfigError("time_step must be > 0");
  if (c.t_max < 0.0) throw ConfigError("t_max must be >= 0");
  if (c.n_traj < 1) throw ConfigError("n_traj must be >= 1");
  if (c.n_rnd < 1) throw ConfigError("n_rnd must be >= 1");
  if (c.n_samples < 2) throw ConfigError("n_samples must be >= 2");
  if (c.prune_threshold < 0.0 || c.prune_threshold >= 1.0) {
    throw ConfigError("prune_threshold must lie in [0, 1)");
  }
  if (!c.initial_pattern.empty()) {
    if (c.initial_pattern.size() != static_cast<std::size_t>(c.n_sites)) {
      throw ConfigError("initial_pattern must have n_sites characters");
    }
    parse_pattern(c.initial_pattern);
  }
}

void apply_setting(SystemConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "n_sites") {
    c.n_sites = parse_integer<int>(key, value);
  } else if (key == "omega_e") {
    c.omega_e = parse_double(key, value);
  } else if (key == "omega_r") {
    c.omega_r = parse_double(key, value);
  } else if (key == "delta_r") {
    c.delta_r = parse_double(key, value);
  } else if (key == "interaction_strength" || key == "V") {
    c.interaction_strength = parse_double(key, value);
  } else if (key == "gamma_e") {
    c.gamma_e = parse_double(key, value);
  } else if (key == "gamma_r") {
    c.gamma_r = parse_double(key, value);
  } else if (key == "boundary") {
    if (value == "periodic") {
      c.boundary = Boundary::periodic;
    } else if (value == "open") {
      c.boundary = Boundary::open;
    } else {
      throw ConfigError("boundary must be 'periodic' or 'open'");
    }
  } else if (key == "potential") {
    if (value == "nearest_neighbor") {
      c.potential = Potential::nearest_neighbor;
    } else if (value == "van_der_waals") {
      c.potential = Potential::van_der_waals;
    } else if (value == "dipolar") {
      c.potential = Potential::dipolar;
    } else {
      throw ConfigError("potential must be nearest_neighbor, van_der_waals or dipolar");
    }
  } else if (key == "potential_cutoff") {
    c.potential_cutoff = parse_integer<int>(key, value);
  } else if (key == "disorder_amplitude") {
    c.disorder_amplitude = parse_double(key, value);
  } else if (key == "random_detunings") {
    auto v = parse_vector(key, value);
    if (v.empty()) {
      c.random_detunings.reset();
    } else {
      c.random_detunings = std::move(v);
    }
  } else if (key == "time_step") {
    c.time_step = parse_double(key, value);
  } else if (key == "t_max") {
    c.t_max = parse_double(key, value);
  } else if (key == "n_traj") {
    c.n_traj = parse_integer<int>(key, value);
  } else if (key == "n_rnd") {
    c.n_rnd = parse_integer<int>(key, value);
  } else if (key == "seed") {
    c.seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "initial_pattern") {
    c.initial_pattern = std::string(value);
  } else if (key == "n_samples") {
    c.n_samples = parse_integer<int>(key, value);
  } else if (key == "mcwf_mode") {
    if (value == "fixed") {
      c.mcwf_mode = McwfMode::fixed;
    } else if (value == "waiting_time") {
      c.mcwf_mode = McwfMode::waiting_time;
    } else {
      throw ConfigError("mcwf_mode must be 'fixed' or 'waiting_time'");
    }
  } else if (key == "prune_threshold") {
    c.prune_threshold = parse_double(key, value);
  } else if (key == "record_jumps") {
    c.record_jumps = parse_bool(key, value);
  } else {
    throw ConfigError("unknown key '" + std::string(key) + "'");
  }
}

void apply_config_text(SystemConfig& c, std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
      }
      try {
        apply_setting(c, line.substr(0, eq), line.substr(eq + 1));
      } catch (const ConfigError& e) {
        throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

SystemConfig parse_config(std::string_view text) {
  SystemConfig c;
  apply_config_text(c, text);
  validate(c);
  return c;
}

std::string read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SystemConfig load_config(const std::filesystem::path& path) { return parse_config(read_config_file(path)); }

std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

std::map<std::string, std::string> to_key_values(const SystemConfig& c) {
  std::map<std::string, std::string> kv;
  kv["n_sites"] = std::to_string(c.n_sites);
  kv["omega_e"] = format_double(c.omega_e);
  kv["omega_r"] = format_double(c.omega_r);
  kv["delta_r"] = format_double(c.delta_r);
  kv["interaction_strength"] = format_double(c.interaction_strength);
  kv["gamma_e"] = format_double(c.gamma_e);
  kv["gamma_r"] = format_double(c.gamma_r);
  kv["boundary"] = std::string(to_string(c.boundary));
  kv["potential"] = std::string(to_string(c.potential));
  kv["potential_cutoff"] = std::to_string(c.potential_cutoff);
  kv["disorder_amplitude"] = format_double(c.disorder_amplitude);
  std::string det;
  if (c.random_detunings) {
    for (std::size_t i = 0; i < c.random_detunings->size(); ++i) {
      if (i) det += ",";
      det += format_double((*c.random_detunings)[i]);
    }
  }
  kv["random_detunings"] = det;
  kv["time_step"] = format_double(c.time_step);
  kv["t_max"] = format_double(c.t_max);
  kv["n_traj"] = std::to_string(c.n_traj);
  kv["n_rnd"] = std::to_string(c.n_rnd);
  kv["seed"] = std::to_string(c.seed);
  kv["initial_pattern"] = c.initial_pattern;
  kv["n_samples"] = std::to_string(c.n_samples);
  kv["mcwf_mode"] = std::string(to_string(c.mcwf_mode));
  kv["prune_threshold"] = format_double(c.prune_threshold);
  kv["record_jumps"] = c.record_jumps ? "true" : "false";
  return kv;
}

std::string to_config_text(const SystemConfig& c) {
  std::string out;
  for (const auto& [k, v] : to_key_values(c)) out += k + " = " + v + "\n";
  return out;
}

std::string_view to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "open"; }

std::string_view to_string(Potential p) {
  switch (p) {
    case Potential::nearest_neighbor: return "nearest_neighbor";
    case Potential::van_der_waals: return "van_der_waals";
    case Potential::dipolar: return "dipolar";
  }
  return "?";
}

std::string_view to_string(Species s) {
  switch (s) {
    case Species::defect: return "defect";
    case Species::facilitated: return "facilitated";
    case Species::non_facilitated: return "non_facilitated";
    case Species::blocked: return "blocked";
  }
  return "?";
}

std::string_view to_string(McwfMode m) { return m == McwfMode::fixed ? "fixed" : "waiting_time"; }

std::vector<AtomLevel> parse_pattern(std::string_view pattern) {
  std::vector<AtomLevel> levels;
  levels.reserve(pattern.size());
  for (char ch : pattern) {
    switch (ch) {
      case 'g': levels.push_back(AtomLevel::g); break;
      case 'e': levels.push_back(AtomLevel::e); break;
      case 'r': levels.push_back(AtomLevel::r); break;
      default: throw ConfigError(std::string("pattern characters must be g, e or r, got '") + ch + "'");
    }
  }
  return levels;
}

std::vector<std::uint8_t> rydberg_flags(std::string_view pattern) {
  std::vector<std::uint8_t> flags;
  for (AtomLevel l : parse_pattern(pattern)) flags.push_back(l == AtomLevel::r ? 1 : 0);
  return flags;
}

}  // namespace rydkcm
