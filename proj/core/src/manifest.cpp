#include "rydkcm/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rydkcm/errors.hpp"

#ifndef RYDKCM_VERSION
#define RYDKCM_VERSION "unknown"
#endif

namespace rydkcm {

using nlohmann::json;

std::string library_version() { return RYDKCM_VERSION; }

OutputFile describe_output(const std::filesystem::path& directory, const std::string& name) {
  const auto path = directory / name;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ull;
  OutputFile f;
  f.name = name;
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    const auto got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
    f.bytes += static_cast<std::uintmax_t>(got);
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  f.fnv1a = hex;
  return f;
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["options"] = m.options;
  j["config"] = m.config;
  j["seeds"] = m.seeds;
  j["version"] = m.version;
  j["residuals"] = m.residuals;
  j["summary"] = m.summary;
  j["wall_time_seconds"] = m.wall_time_seconds;
  j["threads"] = m.threads;
  json outs = json::array();
  for (const auto& f : m.outputs) outs.push_back({{"name", f.name}, {"bytes", f.bytes}, {"fnv1a", f.fnv1a}});
  j["outputs"] = outs;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  RunManifest m;
  try {
    const json j = json::parse(text);
    m.command = j.at("command").get<std::string>();
    m.options = j.value("options", std::map<std::string, std::string>{});
    m.config = j.at("config").get<std::map<std::string, std::string>>();
    m.seeds = j.value("seeds", std::vector<std::uint64_t>{});
    m.version = j.value("version", std::string{});
    m.residuals = j.value("residuals", std::map<std::string, double>{});
    m.summary = j.value("summary", std::map<std::string, double>{});
    m.wall_time_seconds = j.value("wall_time_seconds", 0.0);
    m.threads = j.value("threads", 1);
    for (const auto& f : j.value("outputs", json::array())) {
      m.outputs.push_back({f.at("name").get<std::string>(), f.value("bytes", std::uintmax_t{0}),
                           f.value("fnv1a", std::string{})});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << manifest_to_json(m);
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return manifest_from_json(ss.str());
}

}  // namespace rydkcm
