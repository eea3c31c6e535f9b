#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fluocnn::data {

/// The five chemical quality parameters, in regulatory verification order.
enum class ParameterId { acidity, peroxide, k270, k232, ethyl_esters };

inline constexpr std::array<ParameterId, 5> kAllParameters = {
    ParameterId::acidity, ParameterId::peroxide, ParameterId::k270,
    ParameterId::k232, ParameterId::ethyl_esters};

inline constexpr std::size_t index_of(ParameterId p) {
  return static_cast<std::size_t>(p);
}

/// CSV column / CLI name: "acidity", "peroxide", "k270", "k232", "ethyl_esters".
std::string_view to_string(ParameterId p);
/// Human-readable name with unit, e.g. "Peroxide value (mEq O2/kg)".
std::string_view display_name(ParameterId p);
/// Accepts the CSV names plus "ethyl-esters"/"ee"/"peroxide_value".
ParameterId parse_parameter(std::string_view name);

enum class Grade { evoo, voo, loo };

std::string_view to_string(Grade g);
Grade parse_grade(std::string_view name);

/// Rank for comparisons; lower is better (EVOO = 0).
inline constexpr int rank(Grade g) { return static_cast<int>(g); }

struct OilRecord {
  std::string oil_id;
  std::array<std::optional<double>, 5> values{};
  std::optional<Grade> quality;

  std::optional<double> value(ParameterId p) const { return values[index_of(p)]; }
  bool has(ParameterId p) const { return values[index_of(p)].has_value(); }
  void set(ParameterId p, std::optional<double> v) { values[index_of(p)] = v; }
};

/// Parses a labels table. The header must be
/// `oil_id,acidity,peroxide,k270,k232,ethyl_esters,quality`; when
/// `require_quality` is false the trailing `quality` column may be omitted
/// (the predictions format). Missing values are `-` or empty.
///
/// Throws ParseError (with the 1-based row) for malformed rows and
/// Error(duplicate) for a repeated oil_id.
std::vector<OilRecord> parse_labels(std::string_view csv, bool require_quality = true);
std::vector<OilRecord> load_labels(const std::filesystem::path& path,
                                   bool require_quality = true);

std::string render_labels(const std::vector<OilRecord>& records, bool with_quality = true);

/// Oil id -> per-oil experimental (laboratory) error for one parameter,
/// read from a CSV with header `oil_id,exp_error`.
struct ExperimentalError {
  std::string oil_id;
  double exp_error = 0.0;
};
std::vector<ExperimentalError> load_experimental_errors(const std::filesystem::path& path);
std::vector<ExperimentalError> parse_experimental_errors(std::string_view csv);

}  // namespace fluocnn::data
