#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fluocnn {

/// Flat `key = value` text file shared by the generator and threshold configs.
///
/// Grammar, one entry per line:
///
///     line    := blank | comment | entry
///     comment := '#' any*
///     entry   := key ws* '=' ws* value ws* comment?
///     key     := [A-Za-z0-9_.]+
///
/// Keys are unique. Values are kept verbatim (trimmed); typed getters parse
/// them on access. Insertion order is preserved when rendering.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool contains(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;

  std::string get_string(std::string_view key, std::string_view fallback) const;
  double get_double(std::string_view key, double fallback) const;
  long long get_integer(std::string_view key, long long fallback) const;

  /// Throws Error(config) when the key is absent.
  double require_double(std::string_view key) const;
  std::string require_string(std::string_view key) const;

  void set(std::string_view key, std::string value);

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  std::string render() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace fluocnn
