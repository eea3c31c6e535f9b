#include "fluocnn/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fluocnn/error.hpp"
#include "fluocnn/text_io.hpp"

namespace fluocnn::nn {

TargetScaling TargetScaling::fit(std::span<const double> targets) {
  if (targets.empty()) throw Error(ErrorKind::empty_batch, "no targets to scale");
  const auto n = static_cast<double>(targets.size());
  const double mean = std::accumulate(targets.begin(), targets.end(), 0.0) / n;
  double ss = 0.0;
  for (double t : targets) ss += (t - mean) * (t - mean);
  const double sd = targets.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, sd > 0.0 ? sd : 1.0};
}

std::string TrainTrace::render_csv() const {
  std::string out = "epoch,train_mse,val_mse\n";
  for (const auto& e : epochs) {
    out += std::to_string(e.epoch);
    out += ',';
    out += text::format_double(e.train_mse);
    out += ',';
    if (e.val_mse) out += text::format_double(*e.val_mse);
    out += '\n';
  }
  return out;
}

std::vector<double> predict_all(const Network& net, std::span<const Sample> samples) {
  ForwardCache cache;
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(forward_eval(net, s.x, cache));
  return out;
}

double evaluate_mse(const Network& net, std::span<const Sample> samples) {
  if (samples.empty()) throw Error(ErrorKind::empty_batch, "mse of an empty sample set");
  ForwardCache cache;
  double sum = 0.0;
  for (const auto& s : samples) {
    const double d = forward_eval(net, s.x, cache) - s.y;
    sum += d * d;
  }
  return sum / static_cast<double>(samples.size());
}

TrainTrace train(Network& net, std::span<const Sample> training, const HyperParams& hp, Rng& rng,
                 const TrainOptions& options) {
  hp.validate();
  if (training.empty()) throw Error(ErrorKind::empty_batch, "no training samples");
  const std::size_t every = std::max<std::size_t>(1, options.monitor_every);

  Adam adam(net, AdamConfig{hp.learning_rate, options.beta1, options.beta2, options.epsilon});
  NetworkGradients grads(net);
  ForwardCache cache;
  TrainTrace trace;

  auto monitor = [&](EpochRecord& rec) {
    rec.monitor_train_mse = evaluate_mse(net, training);
    if (!options.validation.empty()) rec.val_mse = evaluate_mse(net, options.validation);
  };
  auto emit = [&](EpochRecord rec) {
    trace.epochs.push_back(rec);
    if (options.on_epoch) options.on_epoch(trace.epochs.back(), net);
  };

  {
    EpochRecord initial;
    initial.epoch = 0;
    monitor(initial);
    initial.train_mse = *initial.monitor_train_mse;
    emit(initial);
  }

  std::vector<std::size_t> order(training.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double sq_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hp.batch) {
      const std::size_t end = std::min(order.size(), start + hp.batch);
      const auto n = static_cast<double>(end - start);
      grads.zero();
      double batch_sq = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const auto& s = training[order[k]];
        const double pred = forward(net, s.x, Mode::train, cache);
        const double d = pred - s.y;
        batch_sq += d * d;
        backward(net, cache, 2.0 * d / n, grads);
      }
      if (!std::isfinite(batch_sq)) {
        throw DivergenceError(epoch, "non-finite training loss");
      }
      sq_sum += batch_sq;
      adam.step(net, grads);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_mse = sq_sum / static_cast<double>(order.size());
    if (epoch % every == 0 || epoch == hp.epochs) {
      monitor(rec);
      if (!std::isfinite(*rec.monitor_train_mse) || (rec.val_mse && !std::isfinite(*rec.val_mse))) {
        throw DivergenceError(epoch, "non-finite monitored loss");
      }
    }
    emit(rec);
  }
  return trace;
}

}  // namespace fluocnn::nn
