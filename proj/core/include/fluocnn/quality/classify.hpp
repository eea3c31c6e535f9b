#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fluocnn/data/oil_record.hpp"
#include "fluocnn/kv_config.hpp"

namespace fluocnn::quality {

using data::Grade;
using data::OilRecord;
using data::ParameterId;

/// Upper limits per grade and parameter. An empty optional means the grade
/// sets no limit on that parameter.
///
/// Keys in the config file: `evoo.<parameter>`, `voo.<parameter>` (a number
/// or `none`) and `unevaluated_cap` (EVOO, VOO or LOO). Keys that are absent
/// keep the built-in defaults.
struct ThresholdSet {
  std::array<std::optional<double>, 5> evoo{};
  std::array<std::optional<double>, 5> voo{};
  /// Best grade reachable when a parameter after acidity is missing.
  Grade unevaluated_cap = Grade::voo;

  std::optional<double> limit(Grade level, ParameterId p) const;

  /// Throws Error(config) for a non-positive limit, an EVOO limit above the
  /// VOO one, or a VOO limit without an EVOO limit.
  void validate() const;

  static ThresholdSet from_kv(const KeyValueConfig& kv);
  KeyValueConfig to_kv() const;
};

/// EVOO: acidity 0.8, peroxide 20, K270 0.22, K232 2.50, ethyl esters 17.
/// VOO: acidity 2.0, peroxide 20, K270 0.25, K232 2.60, no ethyl ester limit.
/// Missing parameters cap the grade at LOO.
ThresholdSet default_thresholds();

enum class CheckOutcome { within_evoo, within_voo, above_voo, unevaluated };

std::string_view to_string(CheckOutcome o);

struct CheckStep {
  ParameterId parameter{};
  std::optional<double> value;
  CheckOutcome outcome{};
};

struct FailedLimit {
  ParameterId parameter{};
  double value = 0.0;
  double limit = 0.0;
  Grade level{};  // the grade whose limit was exceeded
};

struct QualityVerdict {
  Grade grade{};
  std::vector<FailedLimit> failing_parameters;
  std::vector<CheckStep> evaluated_in_order;
  std::vector<ParameterId> unevaluated;
};

/// Chemical-parameter grade. Checks run in the order acidity, peroxide,
/// K270, K232, ethyl esters; a value equal to a limit passes it.
/// Throws Error(insufficient_data) when acidity (or everything) is missing.
QualityVerdict classify(const OilRecord& record, const ThresholdSet& thresholds);

/// Header `oil_id,grade,label_grade,failing,unevaluated,basis`.
std::string render_verdicts_csv(const std::vector<OilRecord>& records,
                                const std::vector<QualityVerdict>& verdicts);

}  // namespace fluocnn::quality
