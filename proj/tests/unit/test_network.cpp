#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fluocnn/error.hpp"
#include "fluocnn/nn/adam.hpp"
#include "fluocnn/nn/checkpoint.hpp"
#include "fluocnn/nn/loss.hpp"
#include "fluocnn/nn/network.hpp"
#include "fluocnn/nn/train.hpp"
#include "oracles.hpp"

using namespace fluocnn;
using namespace fluocnn::nn;

namespace {

HyperParams toy_hp() {
  HyperParams hp;
  hp.filters1 = 3;
  hp.ksize1 = 5;
  hp.pool = 2;
  hp.filters2 = 2;
  hp.ksize2 = 3;
  hp.dense1 = 5;
  hp.dense2 = 4;
  return hp;
}

// Eval-mode prediction composed from the oracle layers only.
double oracle_forward(const Network& net, const std::vector<double>& x) {
  oracle::Maps in{x};
  auto a = oracle::relu(oracle::conv(in, net.conv1));
  auto p = oracle::maxpool(a, net.hyper_params().pool);
  auto b = oracle::relu(oracle::conv(p, net.conv2));
  std::vector<double> flat;
  for (const auto& ch : b) flat.insert(flat.end(), ch.begin(), ch.end());
  auto h1 = oracle::dense(flat, net.dense1);
  auto h2 = oracle::dense(h1, net.dense2);
  return oracle::dense(h2, net.output)[0];
}

std::vector<Sample> as_samples(const std::vector<std::vector<double>>& xs,
                               const std::vector<double>& ys) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < xs.size(); ++i) out.push_back({xs[i], ys[i]});
  return out;
}

}  // namespace

TEST(Shapes, ChosenConfigurationAt1024) {
  HyperParams hp;
  const auto t = shape_trace(hp, 1024);
  EXPECT_EQ(t.conv1, 985u);
  EXPECT_EQ(t.pool, 123u);
  EXPECT_EQ(t.conv2, 104u);
  EXPECT_EQ(t.flatten, 416u);
  EXPECT_EQ(t.output, 1u);
}

TEST(Shapes, GridMatchesClosedForm) {
  for (std::size_t f1 : {4, 6})
    for (std::size_t f2 : {4, 6})
      for (std::size_t pool : {8, 16}) {
        HyperParams hp;
        hp.filters1 = f1;
        hp.filters2 = f2;
        hp.pool = pool;
        const auto t = shape_trace(hp, 1024);
        const std::size_t c1 = 1024 - 40 + 1;
        const std::size_t p = c1 / pool;
        EXPECT_EQ(t.conv1, c1);
        EXPECT_EQ(t.pool, p);
        EXPECT_EQ(t.conv2, p - 20 + 1);
        EXPECT_EQ(t.flatten, f2 * (p - 19));
        Rng rng(1);
        const auto net = Network::build(hp, 1024, rng);
        EXPECT_EQ(net.dense1.inputs, t.flatten);
        EXPECT_EQ(net.output.outputs, 1u);
        EXPECT_EQ(net.parameter_count(), parameter_count(hp, 1024));
      }
}

TEST(Shapes, TooShortInputNamesTheLayer) {
  HyperParams hp;
  try {
    shape_trace(hp, 40);
    FAIL();
  } catch (const ArchitectureError& e) {
    EXPECT_EQ(e.layer(), "pool");
    EXPECT_EQ(e.kind(), ErrorKind::architecture);
  }
  try {
    shape_trace(hp, 39);
    FAIL();
  } catch (const ArchitectureError& e) {
    EXPECT_EQ(e.layer(), "conv1");
  }
  try {
    shape_trace(hp, 40 + 8 * 19 - 1);  // pooled length 19 < ksize2
    FAIL();
  } catch (const ArchitectureError& e) {
    EXPECT_EQ(e.layer(), "conv2");
  }
}

TEST(HyperParams, ValidateRejectsBadValues) {
  HyperParams hp;
  hp.dropout = 1.0;
  EXPECT_THROW(hp.validate(), Error);
  hp = {};
  hp.batch = 0;
  EXPECT_THROW(hp.validate(), Error);
  hp = {};
  hp.learning_rate = std::nan("");
  EXPECT_THROW(hp.validate(), Error);
}

TEST(Network, EqualSeedsGiveEqualWeights) {
  Rng a(42), b(42), c(43);
  const auto n1 = Network::build(toy_hp(), 64, a);
  const auto n2 = Network::build(toy_hp(), 64, b);
  const auto n3 = Network::build(toy_hp(), 64, c);
  const auto b1 = n1.parameter_blocks();
  const auto b2 = n2.parameter_blocks();
  const auto b3 = n3.parameter_blocks();
  bool differs = false;
  for (std::size_t k = 0; k < kParameterBlocks; ++k) {
    ASSERT_TRUE(std::equal(b1[k].begin(), b1[k].end(), b2[k].begin(), b2[k].end()));
    differs |= !std::equal(b1[k].begin(), b1[k].end(), b3[k].begin(), b3[k].end());
  }
  EXPECT_TRUE(differs);
}

TEST(Network, InitialisationScales) {
  HyperParams hp;
  Rng rng(3);
  const auto net = Network::build(hp, 1024, rng);
  const double he1 = std::sqrt(6.0 / 40.0);
  for (double w : net.conv1.filters) EXPECT_LE(std::abs(w), he1);
  const double glorot = std::sqrt(6.0 / (8.0 + 1.0));
  for (double w : net.output.weights) EXPECT_LE(std::abs(w), glorot);
  for (double b : net.dense1.biases) EXPECT_EQ(b, 0.0);
}

TEST(Forward, ZeroNetworkPredictsZero) {
  const auto net = Network::zeros(toy_hp(), 64);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(forward(net, oracle::uniform(rng, 64)), 0.0);
}

TEST(Forward, ZeroFiltersLeaveOnlyOutputBias) {
  Rng r(5);
  auto net = Network::build(toy_hp(), 64, r);
  std::fill(net.conv1.filters.begin(), net.conv1.filters.end(), 0.0);
  std::fill(net.conv2.filters.begin(), net.conv2.filters.end(), 0.0);
  std::fill(net.dense1.biases.begin(), net.dense1.biases.end(), -1.0);
  net.output.biases[0] = 0.375;
  std::mt19937_64 rng(2);
  EXPECT_EQ(forward(net, oracle::uniform(rng, 64)), 0.375);
}

TEST(Forward, MatchesOracleCompositionOnToyNetwork) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Rng r(static_cast<std::uint64_t>(trial));
    auto net = Network::build(toy_hp(), 64, r);
    for (auto blk : net.parameter_blocks()) {
      const auto v = oracle::uniform(rng, blk.size(), -0.5, 0.5);
      std::copy(v.begin(), v.end(), blk.begin());
    }
    const auto x = oracle::uniform(rng, 64, 0.0, 1.0);
    EXPECT_TRUE(oracle::close(forward(net, x), oracle_forward(net, x), 1e-10, 1e-12));
  }
}

TEST(Forward, EvalModeIsPureAndLengthChecked) {
  Rng r(9);
  auto net = Network::build(toy_hp(), 64, r);
  std::mt19937_64 rng(1);
  const auto x = oracle::uniform(rng, 64);
  const double a = forward(net, x);
  const double b = forward(net, x, Mode::eval);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, forward(net, x));
  try {
    forward(net, oracle::uniform(rng, 63));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::shape);
  }
}

TEST(Backward, WholeNetworkMatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    Rng r(static_cast<std::uint64_t>(100 + trial));
    auto net = Network::build(toy_hp(), 64, r);
    for (auto blk : net.parameter_blocks()) {
      const auto v = oracle::uniform(rng, blk.size(), -0.5, 0.5);
      std::copy(v.begin(), v.end(), blk.begin());
    }
    const auto x = oracle::uniform(rng, 64, 0.0, 1.0);
    ForwardCache cache;
    forward_eval(net, x, cache);
    NetworkGradients g(net);
    g.zero();
    backward(net, cache, 1.0, g);

    auto blocks = net.parameter_blocks();
    for (std::size_t k = 0; k < kParameterBlocks; ++k) {
      for (std::size_t i = 0; i < blocks[k].size(); i += 1 + blocks[k].size() / 25) {
        std::vector<double> one{blocks[k][i]};
        auto f = [&] {
          const double saved = blocks[k][i];
          blocks[k][i] = one[0];
          const double y = forward(net, x);
          blocks[k][i] = saved;
          return y;
        };
        const double fd = oracle::central_difference(one, 0, f);
        EXPECT_TRUE(oracle::close(g.blocks[k][i], fd, 1e-4, 1e-7))
            << "block " << k << " index " << i << ": " << g.blocks[k][i] << " vs " << fd;
      }
    }
  }
}

TEST(Backward, SmallStepDecreasesSingleExampleLoss) {
  std::mt19937_64 rng(13);
  int decreased = 0;
  const int draws = 100;
  for (int d = 0; d < draws; ++d) {
    Rng r(static_cast<std::uint64_t>(d));
    auto net = Network::build(toy_hp(), 64, r);
    const auto x = oracle::uniform(rng, 64, 0.0, 1.0);
    const double y = oracle::uniform(rng, 1)[0];
    ForwardCache cache;
    const double pred = forward_eval(net, x, cache);
    const double before = (pred - y) * (pred - y);
    NetworkGradients g(net);
    g.zero();
    backward(net, cache, 2.0 * (pred - y), g);
    auto blocks = net.parameter_blocks();
    for (std::size_t k = 0; k < kParameterBlocks; ++k)
      for (std::size_t i = 0; i < blocks[k].size(); ++i) blocks[k][i] -= 1e-4 * g.blocks[k][i];
    const double after_pred = forward(net, x);
    if ((after_pred - y) * (after_pred - y) < before) ++decreased;
  }
  EXPECT_GE(decreased, 95);
}

TEST(Loss, Examples) {
  const std::vector<double> a{0.5, -1.0};
  EXPECT_EQ(mse_loss(a, a).value, 0.0);
  const auto l = mse_loss(std::vector<double>{1, 3}, std::vector<double>{0, 0});
  EXPECT_DOUBLE_EQ(l.value, 5.0);
  EXPECT_DOUBLE_EQ(l.gradient[0], 1.0);
  EXPECT_DOUBLE_EQ(l.gradient[1], 3.0);
  try {
    mse_loss(std::vector<double>{}, std::vector<double>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::empty_batch);
  }
  EXPECT_THROW(mse_loss(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
}

TEST(Loss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(17);
  auto pred = oracle::uniform(rng, 7);
  const auto target = oracle::uniform(rng, 7);
  const auto l = mse_loss(pred, target);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double fd = oracle::central_difference(pred, i, [&] { return mse_loss(pred, target).value; });
    EXPECT_TRUE(oracle::close(l.gradient[i], fd, 1e-7, 1e-9));
  }
}

TEST(Adam, FirstStepMovesByLearningRate) {
  // With bias correction the first update is lr * g / (|g| + eps).
  auto net = Network::zeros(toy_hp(), 64);
  NetworkGradients g(net);
  g.zero();
  g.blocks[9][0] = 0.3;
  g.blocks[8][1] = -2.0;
  Adam adam(net, AdamConfig{0.01, 0.9, 0.999, 1e-8});
  adam.step(net, g);
  EXPECT_NEAR(net.output.biases[0], -0.01 * 0.3 / (0.3 + 1e-8), 1e-15);
  EXPECT_NEAR(net.output.weights[1], 0.01 * 2.0 / (2.0 + 1e-8), 1e-15);
  EXPECT_EQ(net.output.weights[0], 0.0);
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(Train, ZeroLearningRateLeavesParametersBitwise) {
  std::mt19937_64 rng(19);
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (int i = 0; i < 10; ++i) {
    xs.push_back(oracle::uniform(rng, 64, 0.0, 1.0));
    ys.push_back(oracle::uniform(rng, 1)[0]);
  }
  const auto samples = as_samples(xs, ys);
  auto hp = toy_hp();
  hp.epochs = 1;
  hp.batch = 4;
  hp.learning_rate = 0.0;
  Rng init(1);
  auto net = Network::build(hp, 64, init);
  const auto before = net;
  Rng shuffle(2);
  train(net, samples, hp, shuffle);
  const auto b0 = before.parameter_blocks();
  const auto b1 = net.parameter_blocks();
  for (std::size_t k = 0; k < kParameterBlocks; ++k)
    EXPECT_TRUE(std::equal(b0[k].begin(), b0[k].end(), b1[k].begin(), b1[k].end()));
}

TEST(Train, EqualSeedsGiveEqualTraces) {
  std::mt19937_64 rng(23);
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (int i = 0; i < 12; ++i) {
    xs.push_back(oracle::uniform(rng, 64, 0.0, 1.0));
    ys.push_back(oracle::uniform(rng, 1)[0]);
  }
  const auto samples = as_samples(xs, ys);
  auto hp = toy_hp();
  hp.epochs = 15;
  hp.batch = 5;
  auto run = [&] {
    Rng init(3), shuffle(4);
    auto net = Network::build(hp, 64, init);
    net.dropout_rng.seed(5);
    TrainOptions opt;
    opt.validation = std::span<const Sample>(samples).first(3);
    opt.monitor_every = 5;
    return train(net, samples, hp, shuffle, opt).render_csv();
  };
  const auto a = run();
  EXPECT_EQ(a, run());
  EXPECT_EQ(a.substr(0, a.find('\n')), "epoch,train_mse,val_mse");
}

TEST(Train, LinearToyTaskConverges) {
  // With 1-tap convolutions, pool 1 and positive inputs the network can
  // represent y = sum(x) exactly; a healthy optimiser gets close quickly.
  HyperParams hp;
  hp.filters1 = 4;
  hp.ksize1 = 1;
  hp.pool = 1;
  hp.filters2 = 4;
  hp.ksize2 = 1;
  hp.dense1 = 16;
  hp.dense2 = 8;
  hp.dropout = 0.0;
  hp.batch = 8;
  hp.epochs = 200;
  hp.learning_rate = 1e-2;
  std::mt19937_64 rng(29);
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (int i = 0; i < 64; ++i) {
    xs.push_back(oracle::uniform(rng, 8, 0.0, 1.0));
    double s = 0.0;
    for (double v : xs.back()) s += v;
    ys.push_back(s);
  }
  const auto samples = as_samples(xs, ys);
  Rng init(6), shuffle(7);
  auto net = Network::build(hp, 8, init);
  const auto trace = train(net, samples, hp, shuffle);
  ASSERT_EQ(trace.epochs.size(), 201u);
  const double first = trace.epochs.front().train_mse;
  const double last = *trace.epochs.back().monitor_train_mse;
  EXPECT_LE(last, first / 100.0) << first << " -> " << last;
}

TEST(Train, DivergenceCarriesEpoch) {
  std::vector<std::vector<double>> xs{std::vector<double>(64, 1.0)};
  const auto samples = as_samples(xs, {std::nan("")});
  auto hp = toy_hp();
  hp.epochs = 3;
  Rng init(1), shuffle(2);
  auto net = Network::build(hp, 64, init);
  try {
    train(net, samples, hp, shuffle);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::divergence);
    EXPECT_EQ(e.epoch(), 1u);
  } catch (const Error&) {
    // The epoch-0 monitor already sees a non-finite target.
  }
}

TEST(TargetScaling, FitAndInvert) {
  const std::vector<double> t{1.0, 2.0, 3.0};
  const auto s = TargetScaling::fit(t);
  EXPECT_DOUBLE_EQ(s.offset, 2.0);
  EXPECT_DOUBLE_EQ(s.scale, 1.0);
  EXPECT_DOUBLE_EQ(s.decode(s.encode(2.7)), 2.7);
  const std::vector<double> flat{4.0, 4.0};
  EXPECT_EQ(TargetScaling::fit(flat).scale, 1.0);
}

TEST(Checkpoint, RoundTripIsBitwise) {
  Rng r(31);
  auto net = Network::build(toy_hp(), 64, r);
  const TargetScaling sc{0.42, 1.5};
  const auto bytes = encode_checkpoint(net, sc);
  EXPECT_EQ(bytes.substr(0, 5), "OCNN1");
  EXPECT_EQ(bytes.size(), 77 + 8 * net.parameter_count());
  const auto back = decode_checkpoint(bytes);
  EXPECT_EQ(back.scaling.offset, 0.42);
  EXPECT_EQ(back.scaling.scale, 1.5);
  EXPECT_EQ(back.network.input_length(), 64u);
  EXPECT_EQ(encode_checkpoint(back.network, back.scaling), bytes);
  std::mt19937_64 rng(1);
  const auto x = oracle::uniform(rng, 64);
  EXPECT_EQ(forward(net, x), forward(back.network, x));
}

TEST(Checkpoint, CorruptInputIsParseError) {
  Rng r(1);
  const auto bytes = encode_checkpoint(Network::build(toy_hp(), 64, r), {});
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad), Error);
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, bytes.size() - 1)), Error);
  EXPECT_THROW(decode_checkpoint(bytes + "x"), Error);
  EXPECT_THROW(decode_checkpoint(""), Error);
}
