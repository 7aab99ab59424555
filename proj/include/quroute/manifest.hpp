#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "quroute/errors.hpp"

namespace quroute {

// Every CLI run writes one manifest into its output directory before any
// other file. All randomness flows from the recorded seed, so re-running a
// command from its manifest reproduces the deterministic outputs exactly.
struct RunManifest {
  std::string command;
  nlohmann::json config;  // fully resolved options
  std::uint64_t seed = 0;
  std::string git_describe;
  std::string created_utc;
  std::vector<std::string> outputs;  // file names relative to the run dir
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

inline std::string git_describe_string() {
  FILE* pipe = popen("git describe --always --dirty 2>/dev/null", "r");
  if (!pipe) return "unknown";
  char buf[128] = {0};
  std::string out;
  while (fgets(buf, sizeof(buf), pipe)) out += buf;
  pclose(pipe);
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
  return out.empty() ? "unknown" : out;
}

inline nlohmann::json manifest_to_json(const RunManifest& m) {
  return nlohmann::json{{"command", m.command}, {"config", m.config},
                        {"seed", m.seed},       {"git_describe", m.git_describe},
                        {"created_utc", m.created_utc}, {"outputs", m.outputs}};
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.config = j.at("config");
  m.seed = j.at("seed").get<std::uint64_t>();
  m.git_describe = j.value("git_describe", "unknown");
  m.created_utc = j.value("created_utc", "");
  m.outputs = j.value("outputs", std::vector<std::string>{});
  return m;
}

inline void write_manifest(const std::filesystem::path& out_dir, const RunManifest& m) {
  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  if (!out) throw io_error("cannot write manifest in " + out_dir.string());
  out << manifest_to_json(m).dump(2) << '\n';
}

inline RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read manifest: " + path.string());
  nlohmann::json j;
  in >> j;
  return manifest_from_json(j);
}

}  // namespace quroute
