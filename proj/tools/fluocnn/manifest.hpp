#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace fluocnn::app {

/// manifest.json written into every output directory. `argv` and `cwd` are
/// enough to rerun the command; `outputs` maps each written file to the
/// FNV-1a hash of its bytes.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string cwd;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config_paths;
  nlohmann::json hyperparameters = nlohmann::json::object();
  nlohmann::json details = nlohmann::json::object();
  std::string dataset_fingerprint;
  std::string version;
  std::string started_at;
  std::string finished_at;
  std::map<std::string, std::string> outputs;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

inline constexpr std::string_view kManifestName = "manifest.json";

std::string utc_timestamp();
std::string version_string();

/// Hash over several files' contents, in the given order.
std::string fingerprint_files(const std::vector<std::filesystem::path>& files);

/// Creates the directory and records every file written through it.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);

  const std::filesystem::path& path() const { return dir_; }
  void put(const std::string& name, std::string_view contents);
  /// Registers a file that something else wrote into the directory.
  void adopt(const std::string& name);
  void finish(RunManifest manifest) const;

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> hashes_;
};

RunManifest load_manifest(const std::filesystem::path& path);

}  // namespace fluocnn::app
