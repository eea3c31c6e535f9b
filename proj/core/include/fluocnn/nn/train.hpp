#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fluocnn/nn/adam.hpp"
#include "fluocnn/nn/network.hpp"
#include "fluocnn/rng.hpp"

namespace fluocnn::nn {

struct Sample {
  std::span<const double> x;
  double y = 0.0;
};

/// Affine target standardisation: the network is trained on
/// (y - offset) / scale and its outputs are mapped back with decode().
struct TargetScaling {
  double offset = 0.0;
  double scale = 1.0;

  /// Mean and sample standard deviation of `targets`; scale falls back to
  /// 1 when the targets are constant.
  static TargetScaling fit(std::span<const double> targets);

  double encode(double y) const { return (y - offset) / scale; }
  double decode(double z) const { return z * scale + offset; }
};

struct EpochRecord {
  std::size_t epoch = 0;
  /// Mean squared error over the epoch's mini-batches (train mode). For
  /// epoch 0, before any update, the eval-mode training MSE.
  double train_mse = 0.0;
  /// Eval-mode MSE over the full training set, on monitored epochs.
  std::optional<double> monitor_train_mse;
  /// Eval-mode validation MSE, on monitored epochs when validation data exists.
  std::optional<double> val_mse;
};

struct TrainTrace {
  std::vector<EpochRecord> epochs;

  /// CSV `epoch,train_mse,val_mse`; val_mse is empty on unmonitored epochs.
  std::string render_csv() const;
};

using EpochCallback = std::function<void(const EpochRecord&, const Network&)>;

struct TrainOptions {
  std::span<const Sample> validation;
  /// Monitoring cadence in epochs. Epoch 0 and the last epoch are always monitored.
  std::size_t monitor_every = 10;
  EpochCallback on_epoch;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Runs hp.epochs epochs of shuffled mini-batch Adam on the MSE loss. The
/// final batch of an epoch may be partial. Deterministic given `rng` and
/// the network's dropout stream. Throws DivergenceError on a non-finite loss.
TrainTrace train(Network& net, std::span<const Sample> training, const HyperParams& hp, Rng& rng,
                 const TrainOptions& options = {});

double evaluate_mse(const Network& net, std::span<const Sample> samples);
std::vector<double> predict_all(const Network& net, std::span<const Sample> samples);

}  // namespace fluocnn::nn
