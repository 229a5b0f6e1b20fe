#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace rydkcm {

struct OutputFile {
  std::string name;  // relative to the output directory
  std::uintmax_t bytes = 0;
  std::string fnv1a;  // 64-bit FNV-1a digest, hex
};

/// Everything needed to re-run a command bit-identically.
struct RunManifest {
  std::string command;                      // CLI subcommand or figure id
  std::map<std::string, std::string> options;  // subcommand options other than the config
  std::map<std::string, std::string> config;   // full SystemConfig echo
  std::vector<std::uint64_t> seeds;
  std::string version;
  std::map<std::string, double> residuals;  // invariant checks
  std::map<std::string, double> summary;    // headline numbers of the run
  double wall_time_seconds = 0.0;
  int threads = 1;
  std::vector<OutputFile> outputs;
};

/// Library version string.
std::string library_version();

/// Size and digest of a file.
OutputFile describe_output(const std::filesystem::path& directory, const std::string& name);

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace rydkcm
