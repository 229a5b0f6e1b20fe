#pragma once

#include <chrono>
#include <filesystem>
#include <string>

#include "rydkcm/experiments.hpp"
#include "rydkcm/manifest.hpp"

namespace rydkcm::detail {

// Collects outputs, seeds and checks of one command and writes manifest.json.
class RunRecorder {
 public:
  RunRecorder(std::string command, const Options& options, const SystemConfig& config,
              std::filesystem::path out_dir);

  // Path of a new output file, registered for the manifest.
  std::filesystem::path file(const std::string& name);
  void residual(const std::string& key, double value) { manifest_.residuals[key] = value; }
  void summary(const std::string& key, double value) { manifest_.summary[key] = value; }
  void seed(std::uint64_t s);
  const std::filesystem::path& out_dir() const { return out_dir_; }

  RunManifest finish();

 private:
  std::filesystem::path out_dir_;
  RunManifest manifest_;
  std::vector<std::string> files_;
  std::chrono::steady_clock::time_point start_;
};

void run_figure(std::string_view id, const SystemConfig& config, RunRecorder& rec);

}  // namespace rydkcm::detail
