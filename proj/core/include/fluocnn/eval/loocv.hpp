#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fluocnn/data/dataset.hpp"
#include "fluocnn/nn/network.hpp"
#include "fluocnn/nn/train.hpp"

namespace fluocnn::eval {

using data::ParameterId;

/// Which of the two models kept during a fold's training was used.
enum class CheckpointPolicy { best_val_loss, best_train_loss };

std::string_view to_string(CheckpointPolicy p);
CheckpointPolicy parse_policy(std::string_view s);

struct FoldResult {
  std::string held_out_oil;
  double true_value = 0.0;
  double mae_train = 0.0;
  double mae_val = 0.0;
  /// One prediction per held-out spectrum, in stored order.
  std::vector<double> predictions;
  CheckpointPolicy chosen_checkpoint = CheckpointPolicy::best_val_loss;
  std::size_t checkpoint_epoch = 0;
  /// Oils whose spectra trained this fold.
  std::vector<std::string> training_oils;
};

/// Aggregate over folds (one fold per oil, ordered by oil id).
struct CvSummary {
  ParameterId parameter = ParameterId::acidity;
  CheckpointPolicy policy = CheckpointPolicy::best_val_loss;
  double mean_mae_train = 0.0;
  double sd_mae_train = 0.0;
  double mean_mae_val = 0.0;
  double sd_mae_val = 0.0;
  double var_mae_val = 0.0;
  /// |<MAE_T> - <MAE_V>| / <MAE_T>
  double comparability = 0.0;
  std::vector<FoldResult> per_fold;
  std::optional<double> average_error_pct;
  std::optional<double> label_error_pct;

  /// <MAE_V> > 3 <MAE_T>: the model may be memorising the held-out label.
  bool leakage_suspected() const { return mean_mae_val > 3.0 * mean_mae_train; }
};

/// Builds the aggregate fields from per-fold results. Standard deviations
/// use the sample (n-1) form over folds.
CvSummary summarize(ParameterId parameter, CheckpointPolicy policy,
                    std::vector<FoldResult> folds);

double comparability_ratio(double mean_train, double mean_val);

/// The run whose training and validation <MAE> are most comparable,
/// i.e. with the smaller |<MAE_T> - <MAE_V>| / <MAE_T>. Ties keep the first.
const CvSummary& select_checkpoint(const CvSummary& best_val_run, const CvSummary& best_train_run);

struct LoocvOptions {
  /// Worker threads; 0 means one per hardware thread. Results do not depend on it.
  std::size_t jobs = 0;
  std::size_t monitor_every = 10;
  bool keep_traces = false;
};

struct LoocvResult {
  CvSummary best_val;
  CvSummary best_train;
  CvSummary selected;
  /// Per-fold training traces keyed by held-out oil (when requested).
  std::map<std::string, nn::TrainTrace> traces;
};

/// Leave-one-oil-out cross-validation. For each oil a fresh network is
/// trained on every other oil's spectra and validated on the held-out
/// oil's spectra. Two models are kept per fold, the lowest validation MSE
/// and the lowest training MSE seen on monitored epochs; both runs are
/// summarised and select_checkpoint() picks one. Targets are standardised
/// with the fold's training labels. Spectra that are not normalized yet are
/// normalized first.
///
/// Deterministic in `seed`; each fold draws from its own sub-stream.
LoocvResult loocv(const data::Dataset& dataset, ParameterId parameter, const nn::HyperParams& hp,
                  std::uint64_t seed, const LoocvOptions& options = {});

/// <MAE_V> of predicting the training-label mean for every held-out oil.
double mean_predictor_mae(const data::Dataset& dataset, ParameterId parameter);

struct ErrorPercentages {
  std::optional<double> average_error_pct;
  std::optional<double> label_error_pct;
  std::size_t excluded_zero_labels = 0;
};

/// average error: mean over oils of fold MAE_V / |label| * 100.
/// label error: mean over oils of experimental error / |label| * 100, only
/// when `exp_errors` covers every fold's oil. Zero labels are skipped and
/// counted.
ErrorPercentages error_percentages(const CvSummary& summary,
                                   const std::vector<data::ExperimentalError>* exp_errors);

}  // namespace fluocnn::eval
