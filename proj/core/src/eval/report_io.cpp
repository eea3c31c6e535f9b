#include "fluocnn/eval/report_io.hpp"

#include <cstdio>
#include <limits>
#include <json.hpp>

#include "fluocnn/error.hpp"
#include "fluocnn/text_io.hpp"

namespace fluocnn::eval {

namespace {

using nlohmann::json;

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json fold_to_json(const FoldResult& f) {
  return json{{"held_out_oil", f.held_out_oil},
              {"true_value", f.true_value},
              {"mae_train", f.mae_train},
              {"mae_val", f.mae_val},
              {"chosen_checkpoint", std::string(to_string(f.chosen_checkpoint))},
              {"checkpoint_epoch", f.checkpoint_epoch},
              {"training_oils", f.training_oils},
              {"predictions", f.predictions}};
}

FoldResult fold_from_json(const json& j) {
  FoldResult f;
  f.held_out_oil = j.at("held_out_oil").get<std::string>();
  f.true_value = j.at("true_value").get<double>();
  f.mae_train = j.at("mae_train").get<double>();
  f.mae_val = j.at("mae_val").get<double>();
  f.chosen_checkpoint = parse_policy(j.at("chosen_checkpoint").get<std::string>());
  f.checkpoint_epoch = j.at("checkpoint_epoch").get<std::size_t>();
  f.training_oils = j.at("training_oils").get<std::vector<std::string>>();
  f.predictions = j.at("predictions").get<std::vector<double>>();
  return f;
}

json to_json_value(const CvSummary& s) {
  json folds = json::array();
  for (const auto& f : s.per_fold) folds.push_back(fold_to_json(f));
  return json{{"parameter", std::string(data::to_string(s.parameter))},
              {"policy", std::string(to_string(s.policy))},
              {"n_oil", s.per_fold.size()},
              {"mean_mae_train", s.mean_mae_train},
              {"sd_mae_train", s.sd_mae_train},
              {"mean_mae_val", s.mean_mae_val},
              {"sd_mae_val", s.sd_mae_val},
              {"var_mae_val", s.var_mae_val},
              {"comparability", s.comparability},
              {"leakage_suspected", s.leakage_suspected()},
              {"average_error_pct", optional_number(s.average_error_pct)},
              {"label_error_pct", optional_number(s.label_error_pct)},
              {"per_fold", folds}};
}

CvSummary from_json_value(const json& j) {
  CvSummary s;
  s.parameter = data::parse_parameter(j.at("parameter").get<std::string>());
  s.policy = parse_policy(j.at("policy").get<std::string>());
  s.mean_mae_train = j.at("mean_mae_train").get<double>();
  s.sd_mae_train = j.at("sd_mae_train").get<double>();
  s.mean_mae_val = j.at("mean_mae_val").get<double>();
  s.sd_mae_val = j.at("sd_mae_val").get<double>();
  s.var_mae_val = j.at("var_mae_val").get<double>();
  s.comparability = j.at("comparability").is_null() ? std::numeric_limits<double>::infinity()
                                                       : j.at("comparability").get<double>();
  s.average_error_pct = read_optional(j, "average_error_pct");
  s.label_error_pct = read_optional(j, "label_error_pct");
  for (const auto& f : j.at("per_fold")) s.per_fold.push_back(fold_from_json(f));
  return s;
}

template <typename F>
auto wrap_json_errors(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("summary JSON: ") + e.what());
  }
}

std::string fixed(std::optional<double> v, int precision) {
  if (!v) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, *v);
  return buf;
}

std::string pad(std::string s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string summary_to_json(const CvSummary& summary) {
  return to_json_value(summary).dump(2) + "\n";
}

CvSummary summary_from_json(std::string_view text) {
  return wrap_json_errors([&] { return from_json_value(json::parse(text)); });
}

std::string loocv_result_to_json(const LoocvResult& r) {
  json j = to_json_value(r.selected);
  j["runs"] = json{{"best_val_loss", to_json_value(r.best_val)},
                   {"best_train_loss", to_json_value(r.best_train)}};
  return j.dump(2) + "\n";
}

CvSummary selected_from_json(std::string_view text) { return summary_from_json(text); }

std::string render_folds_csv(const CvSummary& s) {
  std::string out = "oil_id,true_value,mae_train,mae_val,checkpoint,checkpoint_epoch\n";
  for (const auto& f : s.per_fold) {
    out += f.held_out_oil + ',' + text::format_double(f.true_value) + ',' +
           text::format_double(f.mae_train) + ',' + text::format_double(f.mae_val) + ',' +
           std::string(to_string(f.chosen_checkpoint)) + ',' +
           std::to_string(f.checkpoint_epoch) + '\n';
  }
  return out;
}

std::vector<FoldRow> parse_folds_csv(std::string_view csv) {
  std::vector<FoldRow> rows;
  std::size_t pos = 0;
  std::size_t row = 0;
  while (pos < csv.size()) {
    const auto nl = csv.find('\n', pos);
    const auto end = nl == std::string_view::npos ? csv.size() : nl;
    const auto line = text::trim(csv.substr(pos, end - pos));
    pos = end + 1;
    ++row;
    if (line.empty()) continue;
    const auto fields = text::split_csv(line);
    if (row == 1) {
      if (fields.size() < 4 || fields[0] != "oil_id" || fields[3] != "mae_val") {
        throw ParseError(row, "unexpected folds header");
      }
      continue;
    }
    if (fields.size() != 6) throw ParseError(row, "expected 6 fields");
    FoldRow r;
    r.oil_id = std::string(fields[0]);
    try {
      r.true_value = text::parse_double(fields[1]);
      r.mae_train = text::parse_double(fields[2]);
      r.mae_val = text::parse_double(fields[3]);
    } catch (const Error& e) {
      throw ParseError(row, e.what());
    }
    r.checkpoint = std::string(fields[4]);
    rows.push_back(std::move(r));
  }
  if (row == 0) throw ParseError(1, "empty folds file");
  return rows;
}

std::string render_scatter_csv(const CvSummary& s,
                               const std::vector<data::ExperimentalError>* exp_errors) {
  std::string out = "oil_id,repetition,true_value,predicted,exp_error\n";
  for (const auto& f : s.per_fold) {
    std::string err;
    if (exp_errors != nullptr) {
      for (const auto& e : *exp_errors) {
        if (e.oil_id == f.held_out_oil) err = text::format_double(e.exp_error);
      }
    }
    for (std::size_t i = 0; i < f.predictions.size(); ++i) {
      out += f.held_out_oil + ',' + std::to_string(i + 1) + ',' +
             text::format_double(f.true_value) + ',' + text::format_double(f.predictions[i]) +
             ',' + err + '\n';
    }
  }
  return out;
}

std::string render_table(const std::vector<CvSummary>& summaries) {
  constexpr std::size_t name_w = 28;
  constexpr std::size_t col_w = 11;
  std::string out = pad("Parameter", name_w, true);
  for (const char* h : {"<MAE_T>", "sd(MAE_T)", "<MAE_V>", "sd(MAE_V)", "Avg err %", "Label err %"}) {
    out += pad(h, col_w + 1);
  }
  out += '\n';
  out += std::string(name_w + 6 * (col_w + 1), '-') + '\n';
  for (const auto& s : summaries) {
    const int prec = (s.parameter == data::ParameterId::k270 ||
                      s.parameter == data::ParameterId::k232) ? 4 : 3;
    out += pad(std::string(data::display_name(s.parameter)), name_w, true);
    out += pad(fixed(s.mean_mae_train, prec), col_w + 1);
    out += pad(fixed(s.sd_mae_train, prec), col_w + 1);
    out += pad(fixed(s.mean_mae_val, prec), col_w + 1);
    out += pad(fixed(s.sd_mae_val, prec), col_w + 1);
    out += pad(fixed(s.average_error_pct, 1), col_w + 1);
    out += pad(fixed(s.label_error_pct, 1), col_w + 1);
    out += '\n';
  }
  return out;
}

}  // namespace fluocnn::eval
