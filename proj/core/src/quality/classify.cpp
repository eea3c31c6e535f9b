#include "fluocnn/quality/classify.hpp"

#include <algorithm>

#include "fluocnn/error.hpp"
#include "fluocnn/text_io.hpp"

namespace fluocnn::quality {

namespace {

std::optional<double> parse_limit(const std::string& key, const std::string& raw) {
  if (raw == "none" || raw == "-") return std::nullopt;
  try {
    return text::parse_double(raw);
  } catch (const Error&) {
    throw Error(ErrorKind::config, "threshold '" + key + "' is not a number: " + raw);
  }
}

std::string render_limit(const std::optional<double>& v) {
  return v ? text::format_double(*v) : std::string("none");
}

}  // namespace

std::optional<double> ThresholdSet::limit(Grade level, ParameterId p) const {
  switch (level) {
    case Grade::evoo: return evoo[data::index_of(p)];
    case Grade::voo: return voo[data::index_of(p)];
    case Grade::loo: return std::nullopt;
  }
  return std::nullopt;
}

void ThresholdSet::validate() const {
  for (auto p : data::kAllParameters) {
    const auto e = evoo[data::index_of(p)];
    const auto v = voo[data::index_of(p)];
    const std::string name(data::to_string(p));
    if (e && !(*e > 0.0)) throw Error(ErrorKind::config, "EVOO limit for " + name + " must be > 0");
    if (v && !(*v > 0.0)) throw Error(ErrorKind::config, "VOO limit for " + name + " must be > 0");
    if (v && !e) {
      throw Error(ErrorKind::config, "VOO limit for " + name + " needs an EVOO limit as well");
    }
    if (e && v && *e > *v) {
      throw Error(ErrorKind::config, "EVOO limit for " + name + " exceeds the VOO limit");
    }
  }
}

ThresholdSet ThresholdSet::from_kv(const KeyValueConfig& kv) {
  ThresholdSet t = default_thresholds();
  for (const auto& [key, raw] : kv.entries()) {
    if (key == "unevaluated_cap") {
      try {
        t.unevaluated_cap = data::parse_grade(raw);
      } catch (const Error&) {
        throw Error(ErrorKind::config, "unevaluated_cap must be EVOO, VOO or LOO: " + raw);
      }
      continue;
    }
    const auto dot = key.find('.');
    if (dot == std::string::npos) throw Error(ErrorKind::config, "unknown threshold key: " + key);
    const std::string level = key.substr(0, dot);
    ParameterId p{};
    try {
      p = data::parse_parameter(key.substr(dot + 1));
    } catch (const Error&) {
      throw Error(ErrorKind::config, "unknown threshold key: " + key);
    }
    if (level == "evoo") {
      t.evoo[data::index_of(p)] = parse_limit(key, raw);
    } else if (level == "voo") {
      t.voo[data::index_of(p)] = parse_limit(key, raw);
    } else {
      throw Error(ErrorKind::config, "unknown threshold key: " + key);
    }
  }
  t.validate();
  return t;
}

KeyValueConfig ThresholdSet::to_kv() const {
  KeyValueConfig kv;
  for (auto p : data::kAllParameters) {
    kv.set("evoo." + std::string(data::to_string(p)), render_limit(evoo[data::index_of(p)]));
  }
  for (auto p : data::kAllParameters) {
    kv.set("voo." + std::string(data::to_string(p)), render_limit(voo[data::index_of(p)]));
  }
  kv.set("unevaluated_cap", std::string(data::to_string(unevaluated_cap)));
  return kv;
}

ThresholdSet default_thresholds() {
  ThresholdSet t;
  t.evoo = {0.8, 20.0, 0.22, 2.50, 17.0};
  t.voo = {2.0, 20.0, 0.25, 2.60, std::nullopt};
  t.unevaluated_cap = Grade::loo;
  return t;
}

std::string_view to_string(CheckOutcome o) {
  switch (o) {
    case CheckOutcome::within_evoo: return "within_evoo";
    case CheckOutcome::within_voo: return "within_voo";
    case CheckOutcome::above_voo: return "above_voo";
    case CheckOutcome::unevaluated: return "unevaluated";
  }
  return "?";
}

QualityVerdict classify(const OilRecord& record, const ThresholdSet& thresholds) {
  const bool any = std::any_of(record.values.begin(), record.values.end(),
                               [](const auto& v) { return v.has_value(); });
  if (!any) {
    throw Error(ErrorKind::insufficient_data, "oil " + record.oil_id + " has no parameter values");
  }
  if (!record.has(ParameterId::acidity)) {
    throw Error(ErrorKind::insufficient_data, "oil " + record.oil_id + " has no acidity value");
  }

  QualityVerdict verdict;
  Grade worst = Grade::evoo;
  for (auto p : data::kAllParameters) {
    const auto value = record.value(p);
    if (!value) {
      verdict.evaluated_in_order.push_back({p, std::nullopt, CheckOutcome::unevaluated});
      verdict.unevaluated.push_back(p);
      continue;
    }
    Grade level = Grade::evoo;
    if (const auto lim = thresholds.limit(Grade::evoo, p); lim && *value > *lim) {
      verdict.failing_parameters.push_back({p, *value, *lim, Grade::evoo});
      level = Grade::voo;
      // No VOO limit means anything past the EVOO limit is still VOO.
      if (const auto vlim = thresholds.limit(Grade::voo, p); vlim && *value > *vlim) {
        verdict.failing_parameters.push_back({p, *value, *vlim, Grade::voo});
        level = Grade::loo;
      }
    }
    const CheckOutcome outcome = level == Grade::evoo  ? CheckOutcome::within_evoo
                                 : level == Grade::voo ? CheckOutcome::within_voo
                                                       : CheckOutcome::above_voo;
    verdict.evaluated_in_order.push_back({p, value, outcome});
    if (data::rank(level) > data::rank(worst)) worst = level;
  }
  if (!verdict.unevaluated.empty() &&
      data::rank(thresholds.unevaluated_cap) > data::rank(worst)) {
    worst = thresholds.unevaluated_cap;
  }
  verdict.grade = worst;
  return verdict;
}

std::string render_verdicts_csv(const std::vector<OilRecord>& records,
                                const std::vector<QualityVerdict>& verdicts) {
  if (records.size() != verdicts.size()) {
    throw Error(ErrorKind::dimension, "records and verdicts differ in length");
  }
  std::string out = "oil_id,grade,label_grade,failing,unevaluated,basis\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto& v = verdicts[i];
    std::string failing;
    for (const auto& f : v.failing_parameters) {
      if (!failing.empty()) failing += ';';
      failing += std::string(data::to_string(f.parameter)) + ">" + text::format_double(f.limit) +
                 "(" + std::string(data::to_string(f.level)) + ")";
    }
    std::string missing;
    for (auto p : v.unevaluated) {
      if (!missing.empty()) missing += ';';
      missing += data::to_string(p);
    }
    out += r.oil_id + ',' + std::string(data::to_string(v.grade)) + ',' +
           (r.quality ? std::string(data::to_string(*r.quality)) : std::string("-")) + ',' +
           (failing.empty() ? "-" : failing) + ',' + (missing.empty() ? "-" : missing) +
           ",chemical-only\n";
  }
  return out;
}

}  // namespace fluocnn::quality
