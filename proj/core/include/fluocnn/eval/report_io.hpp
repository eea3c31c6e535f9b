#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fluocnn/data/oil_record.hpp"
#include "fluocnn/eval/loocv.hpp"

namespace fluocnn::eval {

/// Structured JSON for one summary, including per-fold predictions.
std::string summary_to_json(const CvSummary& summary);
CvSummary summary_from_json(std::string_view json);

/// summary.json written by `fluocnn loocv`: the selected run plus both
/// checkpoint runs under "runs".
std::string loocv_result_to_json(const LoocvResult& result);
/// Reads back the selected run of a summary.json.
CvSummary selected_from_json(std::string_view json);

/// Per-fold CSV, header
/// `oil_id,true_value,mae_train,mae_val,checkpoint,checkpoint_epoch`.
std::string render_folds_csv(const CvSummary& summary);

struct FoldRow {
  std::string oil_id;
  double true_value = 0.0;
  double mae_train = 0.0;
  double mae_val = 0.0;
  std::string checkpoint;
};
std::vector<FoldRow> parse_folds_csv(std::string_view csv);

/// Predicted-vs-true pairs, header
/// `oil_id,repetition,true_value,predicted,exp_error`; one row per held-out
/// spectrum. exp_error is empty when unknown.
std::string render_scatter_csv(const CvSummary& summary,
                               const std::vector<data::ExperimentalError>* exp_errors);

/// Fixed-width table with the columns <MAE_T>, sd(MAE_T), <MAE_V>,
/// sd(MAE_V), average error (%), label error (%), one row per summary.
std::string render_table(const std::vector<CvSummary>& summaries);

}  // namespace fluocnn::eval
