#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fluocnn::text {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Strict full-field parse; throws Error(parse) on trailing garbage.
double parse_double(std::string_view field);
long long parse_integer(std::string_view field);

std::string_view trim(std::string_view s);

/// Splits one CSV line on commas. Quoting is not supported: none of the
/// file formats here contain commas inside fields.
std::vector<std::string_view> split_csv(std::string_view line);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// 64-bit FNV-1a, used for dataset fingerprints.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace fluocnn::text
