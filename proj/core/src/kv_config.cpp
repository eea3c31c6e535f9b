#include "fluocnn/kv_config.hpp"

#include <algorithm>

#include "fluocnn/error.hpp"
#include "fluocnn/text_io.hpp"

namespace fluocnn {

namespace {

bool valid_key(std::string_view key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '.';
  });
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  std::size_t row = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                              : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++row;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = text::trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(row, "expected 'key = value'");
    }
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    if (!valid_key(key)) {
      throw ParseError(row, "invalid key '" + std::string(key) + "'");
    }
    if (cfg.contains(key)) {
      throw ParseError(row, "duplicate key '" + std::string(key) + "'");
    }
    cfg.entries_.emplace_back(std::string(key), std::string(value));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  const auto text = text::read_file(path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw ParseError(e.row(), path.string() + ": " + e.what());
  }
}

bool KeyValueConfig::contains(std::string_view key) const {
  return get(key).has_value();
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string KeyValueConfig::get_string(std::string_view key,
                                       std::string_view fallback) const {
  auto v = get(key);
  return v ? *v : std::string(fallback);
}

double KeyValueConfig::get_double(std::string_view key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    return text::parse_double(*v);
  } catch (const Error&) {
    throw Error(ErrorKind::config,
                "key '" + std::string(key) + "' is not a number: " + *v);
  }
}

long long KeyValueConfig::get_integer(std::string_view key,
                                      long long fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    return text::parse_integer(*v);
  } catch (const Error&) {
    throw Error(ErrorKind::config,
                "key '" + std::string(key) + "' is not an integer: " + *v);
  }
}

double KeyValueConfig::require_double(std::string_view key) const {
  if (!contains(key)) {
    throw Error(ErrorKind::config, "missing key '" + std::string(key) + "'");
  }
  return get_double(key, 0.0);
}

std::string KeyValueConfig::require_string(std::string_view key) const {
  auto v = get(key);
  if (!v) {
    throw Error(ErrorKind::config, "missing key '" + std::string(key) + "'");
  }
  return *v;
}

void KeyValueConfig::set(std::string_view key, std::string value) {
  if (!valid_key(key)) {
    throw Error(ErrorKind::config, "invalid key '" + std::string(key) + "'");
  }
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::string(key), std::move(value));
}

std::string KeyValueConfig::render() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

}  // namespace fluocnn
