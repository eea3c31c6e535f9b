#include "fluocnn/manifest.hpp"

#include <ctime>

#include "fluocnn/error.hpp"
#include "fluocnn/text_io.hpp"

#ifndef FLUOCNN_VERSION
#define FLUOCNN_VERSION "0.0.0"
#endif

namespace fluocnn::app {

nlohmann::json RunManifest::to_json() const {
  return {{"command", command},
          {"argv", argv},
          {"cwd", cwd},
          {"seed", seed},
          {"config_paths", config_paths},
          {"hyperparameters", hyperparameters},
          {"details", details},
          {"dataset_fingerprint", dataset_fingerprint},
          {"version", version},
          {"started_at", started_at},
          {"finished_at", finished_at},
          {"outputs", outputs}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.cwd = j.value("cwd", std::string());
    m.seed = j.value("seed", std::uint64_t{0});
    m.config_paths = j.value("config_paths", std::map<std::string, std::string>{});
    m.hyperparameters = j.value("hyperparameters", nlohmann::json::object());
    m.details = j.value("details", nlohmann::json::object());
    m.dataset_fingerprint = j.value("dataset_fingerprint", std::string());
    m.version = j.value("version", std::string());
    m.started_at = j.value("started_at", std::string());
    m.finished_at = j.value("finished_at", std::string());
    m.outputs = j.value("outputs", std::map<std::string, std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string version_string() { return FLUOCNN_VERSION; }

std::string fingerprint_files(const std::vector<std::filesystem::path>& files) {
  std::string joined;
  for (const auto& f : files) {
    joined += text::hex64(text::fnv1a64(text::read_file(f)));
    joined += '\n';
  }
  return text::hex64(text::fnv1a64(joined));
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + dir_.string() + ": " + ec.message());
}

void OutputDir::put(const std::string& name, std::string_view contents) {
  const auto target = dir_ / name;
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  text::write_file(target, contents);
  hashes_[name] = text::hex64(text::fnv1a64(contents));
}

void OutputDir::adopt(const std::string& name) {
  hashes_[name] = text::hex64(text::fnv1a64(text::read_file(dir_ / name)));
}

void OutputDir::finish(RunManifest manifest) const {
  manifest.outputs = hashes_;
  manifest.version = version_string();
  manifest.finished_at = utc_timestamp();
  text::write_file(dir_ / std::string(kManifestName), manifest.to_json().dump(2) + "\n");
}

RunManifest load_manifest(const std::filesystem::path& path) {
  const auto raw = text::read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
  return RunManifest::from_json(j);
}

}  // namespace fluocnn::app
