#include <gtest/gtest.h>

#include <cmath>

#include "gradcheck.hpp"
#include "ivuq/errors.hpp"
#include "ivuq/neuralnet.hpp"
#include "ivuq/prob_heads.hpp"
#include "ivuq/synthdata.hpp"

using namespace ivuq;

TEST(DenseNetwork, ParameterCount) {
  const auto sizes = ivim_layer_sizes(14, 3);
  EXPECT_EQ(sizes, (std::vector<std::size_t>{14, 64, 64, 3}));
  EXPECT_EQ(DenseNetwork::parameter_count(sizes), 14u * 64 + 64 + 64 * 64 + 64 + 64 * 3 + 3);
}

TEST(DenseNetwork, RejectsWrongParameterLength) {
  EXPECT_THROW(DenseNetwork({2, 3}, std::vector<double>(5)), InvalidArgument);
  EXPECT_THROW(init_network({2, 3, 1}, 0), InvalidArgument);
}

TEST(InitNetwork, HeUniformBoundsAndZeroBias) {
  const auto net = init_network(ivim_layer_sizes(14, 30), 17);
  for (std::size_t l = 0; l < net.num_affine(); ++l) {
    const double bound = std::sqrt(6.0 / static_cast<double>(net.layer_sizes()[l]));
    const auto w = net.weight(l);
    EXPECT_LE(w.cwiseAbs().maxCoeff(), bound);
    EXPECT_GT(w.cwiseAbs().maxCoeff(), 0.5 * bound);
    EXPECT_EQ(net.bias(l).cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_EQ(net, init_network(ivim_layer_sizes(14, 30), 17));
  EXPECT_FALSE(net == init_network(ivim_layer_sizes(14, 30), 18));
}

TEST(Forward, MatchesManualComputation) {
  // 2 -> 2 -> 2 -> 1 with hand-picked parameters.
  std::vector<double> p{
      1.0, -1.0, 0.5, 2.0, 0.1, -0.2,  // W0 column-major, b0
      1.0, 0.0, 0.0, 1.0, 0.0, 0.0,    // W1 identity, b1
      1.0, -1.0, 0.3};                 // W2, b2
  const DenseNetwork net({2, 2, 2, 1}, p);
  const std::vector<double> x{0.5, -1.0};
  const double z0 = 1.0 * 0.5 + 0.5 * -1.0 + 0.1;
  const double z1 = -1.0 * 0.5 + 2.0 * -1.0 - 0.2;
  const double h0 = elu(elu(z0)), h1 = elu(elu(z1));
  const Vector out = forward(net, x);
  EXPECT_NEAR(out[0], h0 - h1 + 0.3, 1e-15);
}

TEST(Forward, BatchEqualsSingle) {
  const auto net = init_network(ivim_layer_sizes(5, 4, 8), 3);
  Matrix x = Matrix::Random(5, 7);
  const Matrix batch = forward(net, x);
  for (Eigen::Index j = 0; j < 7; ++j) {
    const Vector single = forward(net, std::span<const double>(x.col(j).data(), 5));
    EXPECT_NEAR((batch.col(j) - single).cwiseAbs().maxCoeff(), 0.0, 1e-14);
  }
}

TEST(Backward, MatchesFiniteDifferences) {
  const auto net = init_network(ivim_layer_sizes(6, 3, 8), 21);
  Matrix x = Matrix::Random(6, 4);
  Matrix y = (Matrix::Random(3, 4).array() + 1.0) / 2.0;
  const auto check = ivuq::test::check_gradient(net, HeadSpec::point(), x, y);
  EXPECT_LT(check.max_relative_error, 1e-6);
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = TrainConfig{};
  c.beta1 = 1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = TrainConfig{};
  c.learning_rate = -1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  TrainConfig c;
  c.learning_rate = 0.01;
  Adam adam(2, c);
  std::vector<double> p{1.0, -1.0};
  const std::vector<double> g{3.0, -0.5};
  adam.step(p, g);
  // Bias-corrected first step is lr * sign(g) up to epsilon.
  EXPECT_NEAR(p[0], 0.99, 1e-8);
  EXPECT_NEAR(p[1], -0.99, 1e-8);
  EXPECT_EQ(adam.steps(), 1u);
}

namespace {

TrainingSet tiny_set(std::size_t n, std::uint64_t seed) {
  CorpusOptions o;
  o.n = n;
  o.seed = seed;
  o.snr = {50.0, 50.0};
  return sample_training_set(o);
}

}  // namespace

TEST(Train, LossDecreasesAndIsDeterministic) {
  const auto set = tiny_set(2000, 1);
  TrainConfig c;
  c.learning_rate = 1e-3;
  c.epochs = 5;
  c.seed = 9;
  const auto loss = make_batch_loss(HeadSpec::point());
  const auto net = init_network(ivim_layer_sizes(14, 3, 16), 4);
  const auto r1 = train(net, loss, set, &set, c);
  const auto r2 = train(net, loss, set, &set, c);
  ASSERT_EQ(r1.history.train.size(), 5u);
  EXPECT_LT(r1.history.train.back(), r1.history.train.front());
  EXPECT_EQ(r1.net, r2.net);
  EXPECT_EQ(r1.history.validation, r2.history.validation);
}

TEST(Train, ZeroLearningRateKeepsWeights) {
  const auto set = tiny_set(300, 2);
  TrainConfig c;
  c.learning_rate = 0.0;
  c.epochs = 2;
  const auto net = init_network(ivim_layer_sizes(14, 3, 8), 4);
  const auto r = train(net, make_batch_loss(HeadSpec::point()), set, nullptr, c);
  EXPECT_EQ(r.net, net);
  EXPECT_NEAR(r.history.train[0], r.history.train[1], 1e-12);
}

TEST(Train, NonFiniteLossAborts) {
  const auto set = tiny_set(300, 2);
  TrainConfig c;
  c.epochs = 1;
  const auto net = init_network(ivim_layer_sizes(14, 3, 8), 4);
  const BatchLoss bad = [](const Matrix&, const Matrix&, Matrix* g) {
    if (g) g->setZero(3, 1);
    return std::nan("");
  };
  try {
    train(net, bad, set, nullptr, c);
    FAIL() << "expected NumericalFailure";
  } catch (const NumericalFailure& e) {
    EXPECT_NE(std::string(e.what()).find("epoch 0"), std::string::npos) << e.what();
    EXPECT_EQ(e.exit_code(), 2);
  }
}
