#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rydkcm/config.hpp"
#include "rydkcm/errors.hpp"
#include "rydkcm/experiments.hpp"
#include "rydkcm/manifest.hpp"
#include "rydkcm/regime.hpp"

namespace fs = std::filesystem;
using namespace rydkcm;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out = "out";
};

void add_common(CLI::App* sub, Common& c, bool with_out = true) {
  sub->add_option("--config", c.config_path, "key = value config file")->check(CLI::ExistingFile);
  sub->add_option("--set", c.sets, "override one config key (key=value), repeatable");
  if (with_out) sub->add_option("--out", c.out, "output directory")->capture_default_str();
}

SystemConfig build_config(const Common& c, SystemConfig base) {
  if (!c.config_path.empty()) apply_config_text(base, read_config_file(c.config_path));
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    apply_setting(base, s.substr(0, eq), s.substr(eq + 1));
  }
  validate(base);
  return base;
}

void print_warnings(const SystemConfig& config) {
  for (const auto& w : validate_regime(config)) std::cerr << "warning [" << w.code << "]: " << w.message << "\n";
}

void print_manifest(const RunManifest& m, const fs::path& out) {
  std::cout << m.command << ": wrote " << m.outputs.size() << " files to " << out.string() << " in "
            << format_double(m.wall_time_seconds) << " s\n";
  for (const auto& [k, v] : m.summary) std::cout << "  " << k << " = " << format_double(v) << "\n";
  for (const auto& [k, v] : m.residuals) std::cout << "  residual " << k << " = " << format_double(v) << "\n";
}

// Re-runs a recorded command and compares output digests.
int replay(const fs::path& dir, const fs::path& out) {
  const RunManifest recorded = read_manifest(dir / "manifest.json");
  SystemConfig config;
  for (const auto& [k, v] : recorded.config) apply_setting(config, k, v);
  const RunManifest fresh = run_command(recorded.command, recorded.options, config, out);
  int mismatches = 0;
  for (const auto& f : recorded.outputs) {
    const auto it = std::find_if(fresh.outputs.begin(), fresh.outputs.end(),
                                 [&](const OutputFile& g) { return g.name == f.name; });
    if (it == fresh.outputs.end()) {
      std::cout << "missing " << f.name << "\n";
      ++mismatches;
    } else if (it->fnv1a != f.fnv1a) {
      std::cout << "differs " << f.name << " (" << f.fnv1a << " vs " << it->fnv1a << ")\n";
      ++mismatches;
    } else {
      std::cout << "identical " << f.name << "\n";
    }
  }
  if (recorded.version != fresh.version) {
    std::cout << "note: recorded with version " << recorded.version << ", replayed with " << fresh.version << "\n";
  }
  return mismatches == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven Rydberg chains and their kinetically constrained limit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", library_version());

  Common common;
  Options opts;

  auto* rates = app.add_subcommand("rates", "single-atom rates by every available method");
  add_common(rates, common);
  int trajectories = 0;
  rates->add_option("--trajectories", trajectories, "trajectory estimate with this many trajectories");

  auto* me = app.add_subcommand("evolve-me", "master-equation evolution");
  add_common(me, common);
  std::string mode;
  me->add_option("--mode", mode, "three_level or two_level")->check(CLI::IsMember({"three_level", "two_level"}));

  auto* mcwf = app.add_subcommand("evolve-mcwf", "quantum-trajectory ensemble");
  add_common(mcwf, common);

  auto* cluster = app.add_subcommand("cluster", "reduced cluster-model spectrum and dynamics");
  add_common(cluster, common);
  std::string compare_full, boundary;
  cluster->add_option("--compare-full", compare_full, "also evolve the full two-level chain (true/false)");
  cluster->add_option("--boundary", boundary, "open or periodic")->check(CLI::IsMember({"open", "periodic"}));

  auto* kcm = app.add_subcommand("kcm", "classical kinetically constrained model");
  add_common(kcm, common);
  std::string constraint, d_eq, beta, coupling, exact;
  kcm->add_option("--constraint", constraint, "one_sfm or unconstrained");
  kcm->add_option("--d-eq", d_eq, "equilibrium defect density");
  kcm->add_option("--beta", beta, "inverse temperature (overrides --d-eq)");
  kcm->add_option("--K", coupling, "energy scale of the spin Hamiltonian");
  kcm->add_option("--exact", exact, "also solve the rate equation exactly (true/false)");

  auto* disorder = app.add_subcommand("disorder", "average over random Rydberg detunings");
  add_common(disorder, common);

  auto* figure = app.add_subcommand("figure", "named figure preset");
  add_common(figure, common);
  std::string figure_id;
  figure->add_option("id", figure_id, "figure id")->required()->check(CLI::IsMember(figure_ids()));

  auto* check = app.add_subcommand("validate", "check a config and report regime warnings");
  add_common(check, common, false);

  auto* rep = app.add_subcommand("replay", "re-run a recorded output directory and compare digests");
  std::string replay_dir, replay_out;
  rep->add_option("dir", replay_dir, "directory holding manifest.json")->required()->check(CLI::ExistingDirectory);
  rep->add_option("--out", replay_out, "where to write the replay (default: <dir>/replay)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rep) {
      const fs::path out = replay_out.empty() ? fs::path(replay_dir) / "replay" : fs::path(replay_out);
      return replay(replay_dir, out);
    }
    if (*check) {
      const SystemConfig config = build_config(common, SystemConfig{});
      print_warnings(config);
      std::cout << to_config_text(config);
      return 0;
    }

    auto put = [&](const char* key, const std::string& value) {
      if (!value.empty()) opts[key] = value;
    };
    std::string command;
    SystemConfig base;
    if (*rates) {
      command = "rates";
      if (trajectories > 0) opts["trajectories"] = std::to_string(trajectories);
    } else if (*me) {
      command = "evolve-me";
      put("mode", mode);
    } else if (*mcwf) {
      command = "evolve-mcwf";
    } else if (*cluster) {
      command = "cluster";
      put("compare_full", compare_full);
      put("boundary", boundary);
    } else if (*kcm) {
      command = "kcm";
      put("constraint", constraint);
      put("d_eq", d_eq);
      put("beta", beta);
      put("K", coupling);
      put("exact", exact);
    } else if (*disorder) {
      command = "disorder";
    } else {
      command = "figure";
      opts["id"] = figure_id;
      base = figure_config(figure_id);
    }
    const SystemConfig config = build_config(common, base);
    print_warnings(config);
    const RunManifest m = run_command(command, opts, config, common.out);
    print_manifest(m, common.out);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
