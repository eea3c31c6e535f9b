#include "fluocnn/eval/loocv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "fluocnn/error.hpp"
#include "fluocnn/eval/metrics.hpp"
#include "fluocnn/rng.hpp"

namespace fluocnn::eval {

namespace {

struct FoldOutcome {
  FoldResult best_val;
  FoldResult best_train;
  nn::TrainTrace trace;
};

struct FoldData {
  std::string oil;
  double label = 0.0;
  std::vector<std::string> training_oils;
  std::vector<nn::Sample> train;       // standardised targets
  std::vector<double> train_labels;    // raw targets
  std::vector<nn::Sample> validation;  // standardised targets
  nn::TargetScaling scaling;
};

FoldResult evaluate_checkpoint(const nn::Network& net, const FoldData& fold,
                               CheckpointPolicy policy, std::size_t epoch) {
  FoldResult r;
  r.held_out_oil = fold.oil;
  r.true_value = fold.label;
  r.chosen_checkpoint = policy;
  r.checkpoint_epoch = epoch;
  r.training_oils = fold.training_oils;

  auto decode = [&](std::vector<double> z) {
    for (double& v : z) v = fold.scaling.decode(v);
    return z;
  };
  const auto train_pred = decode(nn::predict_all(net, fold.train));
  r.mae_train = mae(train_pred, fold.train_labels);
  r.predictions = decode(nn::predict_all(net, fold.validation));
  const std::vector<double> truth(r.predictions.size(), fold.label);
  r.mae_val = mae(r.predictions, truth);
  return r;
}

FoldOutcome run_fold(const FoldData& fold, std::size_t input_length, const nn::HyperParams& hp,
                     std::uint64_t seed, const LoocvOptions& options) {
  auto init_rng = SeedKey(seed).mix("loocv").mix(fold.oil).mix("init").rng();
  auto train_rng = SeedKey(seed).mix("loocv").mix(fold.oil).mix("shuffle").rng();
  auto net = nn::Network::build(hp, input_length, init_rng);

  nn::Network best_val = net;
  nn::Network best_train = net;
  double best_val_mse = std::numeric_limits<double>::infinity();
  double best_train_mse = std::numeric_limits<double>::infinity();
  std::size_t best_val_epoch = 0;
  std::size_t best_train_epoch = 0;

  nn::TrainOptions topt;
  topt.validation = fold.validation;
  topt.monitor_every = options.monitor_every;
  topt.on_epoch = [&](const nn::EpochRecord& rec, const nn::Network& current) {
    if (rec.val_mse && *rec.val_mse < best_val_mse) {
      best_val_mse = *rec.val_mse;
      best_val = current;
      best_val_epoch = rec.epoch;
    }
    if (rec.monitor_train_mse && *rec.monitor_train_mse < best_train_mse) {
      best_train_mse = *rec.monitor_train_mse;
      best_train = current;
      best_train_epoch = rec.epoch;
    }
  };

  FoldOutcome out;
  out.trace = nn::train(net, fold.train, hp, train_rng, topt);
  out.best_val = evaluate_checkpoint(best_val, fold, CheckpointPolicy::best_val_loss, best_val_epoch);
  out.best_train =
      evaluate_checkpoint(best_train, fold, CheckpointPolicy::best_train_loss, best_train_epoch);
  return out;
}

[[noreturn]] void rethrow_with_fold(const std::string& oil, std::exception_ptr ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const DivergenceError& e) {
    throw DivergenceError(e.epoch(), "fold " + oil + ": " + e.what());
  } catch (const Error& e) {
    throw Error(e.kind(), "fold " + oil + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(CheckpointPolicy p) {
  return p == CheckpointPolicy::best_val_loss ? "best_val_loss" : "best_train_loss";
}

CheckpointPolicy parse_policy(std::string_view s) {
  if (s == "best_val_loss") return CheckpointPolicy::best_val_loss;
  if (s == "best_train_loss") return CheckpointPolicy::best_train_loss;
  throw Error(ErrorKind::parse, "unknown checkpoint policy '" + std::string(s) + "'");
}

double comparability_ratio(double mean_train, double mean_val) {
  const double diff = std::abs(mean_train - mean_val);
  if (mean_train > 0.0) return diff / mean_train;
  return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

CvSummary summarize(ParameterId parameter, CheckpointPolicy policy,
                    std::vector<FoldResult> folds) {
  if (folds.empty()) throw Error(ErrorKind::empty_dataset, "no folds to summarise");
  std::sort(folds.begin(), folds.end(), [](const FoldResult& a, const FoldResult& b) {
    return a.held_out_oil < b.held_out_oil;
  });
  std::vector<double> t;
  std::vector<double> v;
  for (const auto& f : folds) {
    t.push_back(f.mae_train);
    v.push_back(f.mae_val);
  }
  const auto ts = mean_and_sample_sd(t);
  const auto vs = mean_and_sample_sd(v);
  CvSummary s;
  s.parameter = parameter;
  s.policy = policy;
  s.mean_mae_train = ts.mean;
  s.sd_mae_train = ts.sd;
  s.mean_mae_val = vs.mean;
  s.sd_mae_val = vs.sd;
  s.var_mae_val = vs.variance;
  s.comparability = comparability_ratio(ts.mean, vs.mean);
  s.per_fold = std::move(folds);
  return s;
}

const CvSummary& select_checkpoint(const CvSummary& best_val_run,
                                   const CvSummary& best_train_run) {
  return best_train_run.comparability < best_val_run.comparability ? best_train_run
                                                                   : best_val_run;
}

LoocvResult loocv(const data::Dataset& dataset, ParameterId parameter, const nn::HyperParams& hp,
                  std::uint64_t seed, const LoocvOptions& options) {
  hp.validate();
  dataset.validate();
  if (dataset.excitations().size() > 1) {
    throw Error(ErrorKind::domain, "cross-validation needs single-excitation data");
  }
  const auto prepared = data::prepare(dataset);

  std::vector<const data::OilRecord*> oils;
  for (const auto& r : prepared.records) {
    if (!r.has(parameter)) {
      throw Error(ErrorKind::domain, "oil " + r.oil_id + " has no " +
                                         std::string(data::to_string(parameter)) +
                                         " value; filter the dataset first");
    }
    oils.push_back(&r);
  }
  if (oils.size() < 3) {
    throw Error(ErrorKind::insufficient_samples, "cross-validation needs at least 3 oils");
  }
  std::sort(oils.begin(), oils.end(),
            [](const auto* a, const auto* b) { return a->oil_id < b->oil_id; });
  const std::size_t input_length = prepared.grid->size();
  nn::shape_trace(hp, input_length);

  std::vector<FoldData> folds(oils.size());
  for (std::size_t f = 0; f < oils.size(); ++f) {
    auto& fold = folds[f];
    fold.oil = oils[f]->oil_id;
    fold.label = *oils[f]->value(parameter);
    for (const auto* o : oils) {
      if (o->oil_id != fold.oil) fold.training_oils.push_back(o->oil_id);
    }
    for (const auto& s : prepared.spectra) {
      if (s.oil_id != fold.oil) fold.train_labels.push_back(*prepared.record(s.oil_id).value(parameter));
    }
    fold.scaling = nn::TargetScaling::fit(fold.train_labels);
    std::size_t k = 0;
    for (const auto& s : prepared.spectra) {
      if (s.oil_id == fold.oil) {
        fold.validation.push_back({s.intensities, fold.scaling.encode(fold.label)});
      } else {
        fold.train.push_back({s.intensities, fold.scaling.encode(fold.train_labels[k++])});
      }
    }
  }

  std::vector<FoldOutcome> outcomes(folds.size());
  std::vector<std::exception_ptr> errors(folds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t f = next++; f < folds.size(); f = next++) {
      try {
        outcomes[f] = run_fold(folds[f], input_length, hp, seed, options);
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
  };
  std::size_t jobs = options.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                       : options.jobs;
  jobs = std::min(jobs, folds.size());
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (errors[f]) rethrow_with_fold(folds[f].oil, errors[f]);
  }

  LoocvResult result;
  std::vector<FoldResult> by_val;
  std::vector<FoldResult> by_train;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    by_val.push_back(std::move(outcomes[f].best_val));
    by_train.push_back(std::move(outcomes[f].best_train));
    if (options.keep_traces) result.traces.emplace(folds[f].oil, std::move(outcomes[f].trace));
  }
  result.best_val = summarize(parameter, CheckpointPolicy::best_val_loss, std::move(by_val));
  result.best_train = summarize(parameter, CheckpointPolicy::best_train_loss, std::move(by_train));
  result.selected = select_checkpoint(result.best_val, result.best_train);
  return result;
}

double mean_predictor_mae(const data::Dataset& dataset, ParameterId parameter) {
  std::vector<double> fold_mae;
  for (const auto& held : dataset.records) {
    if (!held.has(parameter)) continue;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : dataset.spectra) {
      if (s.oil_id == held.oil_id) continue;
      sum += *dataset.record(s.oil_id).value(parameter);
      ++n;
    }
    if (n == 0) continue;
    fold_mae.push_back(std::abs(sum / static_cast<double>(n) - *held.value(parameter)));
  }
  if (fold_mae.empty()) throw Error(ErrorKind::empty_dataset, "no folds for the baseline");
  return mean_and_sample_sd(fold_mae).mean;
}

ErrorPercentages error_percentages(const CvSummary& summary,
                                   const std::vector<data::ExperimentalError>* exp_errors) {
  ErrorPercentages out;
  double avg_sum = 0.0;
  double label_sum = 0.0;
  std::size_t n = 0;
  bool label_complete = exp_errors != nullptr;
  for (const auto& f : summary.per_fold) {
    if (f.true_value == 0.0) {
      ++out.excluded_zero_labels;
      continue;
    }
    const double label = std::abs(f.true_value);
    avg_sum += f.mae_val / label;
    ++n;
    if (label_complete) {
      const auto it = std::find_if(exp_errors->begin(), exp_errors->end(),
                                   [&](const auto& e) { return e.oil_id == f.held_out_oil; });
      if (it == exp_errors->end()) {
        label_complete = false;
      } else {
        label_sum += it->exp_error / label;
      }
    }
  }
  if (n > 0) {
    out.average_error_pct = 100.0 * avg_sum / static_cast<double>(n);
    if (label_complete) out.label_error_pct = 100.0 * label_sum / static_cast<double>(n);
  }
  return out;
}

}  // namespace fluocnn::eval
