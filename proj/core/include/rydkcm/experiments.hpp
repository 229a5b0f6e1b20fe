#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rydkcm/config.hpp"
#include "rydkcm/manifest.hpp"
#include "rydkcm/observables.hpp"

namespace rydkcm {

using Options = std::map<std::string, std::string>;

/// Runs one command and writes its CSV files and manifest.json into
/// `out_dir`. Commands and their options (all optional):
///   rates        trajectories=<n> (trajectory estimate at delta*=0, t_max from config)
///   evolve-me    mode=three_level|two_level
///   evolve-mcwf  (config only)
///   cluster      compare_full=true|false
///   kcm          constraint=one_sfm|unconstrained, d_eq=<p> or beta=<b>, K=<k>
///   disorder     (config only: disorder_amplitude, n_rnd, n_traj)
///   figure       id=<fig2|fig3|fig4a|fig4b|fig6|fig7|fig8|fig9>
/// The manifest stores the command, options and full config so that
/// run_command can replay it bit-identically.
RunManifest run_command(const std::string& command, const Options& options, const SystemConfig& config,
                        const std::filesystem::path& out_dir);

std::vector<std::string> command_names();

/// Figure presets: the base configuration of each figure, before overrides.
std::vector<std::string> figure_ids();
SystemConfig figure_config(std::string_view id);

/// Per-site populations (time, site, R, stderr) and concentration
/// (time, r, stderr) files.
void write_populations_csv(const std::filesystem::path& path, const std::vector<double>& times,
                           const Eigen::MatrixXd& mean, const Eigen::MatrixXd& std_error);
void write_concentration_csv(const std::filesystem::path& path, const std::vector<double>& times,
                             const Eigen::VectorXd& r, const Eigen::VectorXd& std_error);

}  // namespace rydkcm
