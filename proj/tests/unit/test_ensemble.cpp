#include <gtest/gtest.h>

#include <cmath>

#include "ivuq/ensemble.hpp"
#include "ivuq/errors.hpp"

using namespace ivuq;

namespace {

MixturePrediction random_mixture(std::size_t k, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MixturePrediction m;
  for (auto& p : m.params) {
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      p.weights.push_back(u(rng) + 0.01);
      total += p.weights.back();
      p.means.push_back(u(rng));
      p.stddevs.push_back(0.01 + 0.2 * u(rng));
    }
    for (double& w : p.weights) w /= total;
  }
  return m;
}

TrainingSet small_set(std::size_t n) {
  CorpusOptions o;
  o.n = n;
  o.seed = 3;
  return sample_training_set(o);
}

}  // namespace

TEST(Moments, SingleGaussian) {
  MixturePrediction m;
  for (auto& p : m.params) p = {{1.0}, {0.3}, {0.2}};
  const auto mo = mixture_moments(m);
  EXPECT_DOUBLE_EQ(mo.mean[0], 0.3);
  EXPECT_NEAR(mo.variance[2], 0.04, 1e-16);
}

TEST(Pool, UniformWeights) {
  Rng rng(1);
  std::vector<MixturePrediction> members{random_mixture(2, rng), random_mixture(2, rng), random_mixture(2, rng)};
  const auto pooled = pool_mixtures(members);
  ASSERT_EQ(pooled.k(), 6u);
  double total = 0.0;
  for (double w : pooled[0].weights) total += w;
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_NEAR(pooled[1].weights[3], members[1][1].weights[1] / 3.0, 1e-16);
  EXPECT_THROW(pool_mixtures(std::span<const MixturePrediction>{}), InvalidArgument);
}

TEST(Decompose, LawOfTotalVariance) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<MixturePrediction> members;
    for (int m = 0; m < 5; ++m) members.push_back(random_mixture(3, rng));
    const auto dec = decompose_uncertainty(members);
    const auto total = mixture_moments(pool_mixtures(members));
    for (std::size_t p = 0; p < kNumParams; ++p)
      EXPECT_NEAR(dec.au[p] * dec.au[p] + dec.eu[p] * dec.eu[p], total.variance[p], 1e-12);
  }
}

TEST(Decompose, IdenticalMembersHaveNoEpistemic) {
  Rng rng(3);
  const auto m = random_mixture(4, rng);
  const std::vector<MixturePrediction> members{m, m, m};
  const auto dec = decompose_uncertainty(members);
  for (std::size_t p = 0; p < kNumParams; ++p) {
    EXPECT_NEAR(dec.eu[p], 0.0, 1e-15);
    EXPECT_NEAR(dec.au[p] * dec.au[p], mixture_moments(m).variance[p], 1e-15);
  }
}

TEST(Decompose, NeedsTwoMembers) {
  Rng rng(4);
  const std::vector<MixturePrediction> one{random_mixture(2, rng)};
  EXPECT_THROW(decompose_uncertainty(one), UndefinedMetric);
}

TEST(PooledSample, SizeAndMemberOrder) {
  std::vector<MixturePrediction> members(2);
  for (auto& p : members[0].params) p = {{1.0}, {0.1}, {1e-6}};
  for (auto& p : members[1].params) p = {{1.0}, {0.9}, {1e-6}};
  Rng rng(5);
  const auto s = pooled_sample(members, 10, rng);
  ASSERT_EQ(s[0].size(), 20u);
  EXPECT_NEAR(s[0][0], 0.1, 1e-4);
  EXPECT_NEAR(s[0][19], 0.9, 1e-4);
}

TEST(TrainEnsemble, MemberSeedsAndDeterminism) {
  const auto set = small_set(600);
  EnsembleTrainOptions o;
  o.spec = HeadSpec::mdn(2);
  o.members = 2;
  o.base_seed = 100;
  o.hidden = 8;
  o.train.epochs = 2;
  o.train.learning_rate = 1e-3;
  const auto a = train_ensemble(set, nullptr, o);
  auto o2 = o;
  o2.workers = 2;
  const auto b = train_ensemble(set, nullptr, o2);
  ASSERT_EQ(a.ensemble.size(), 2u);
  EXPECT_EQ(a.ensemble.seeds, (std::vector<std::uint64_t>{100, 101}));
  EXPECT_EQ(a.ensemble.members[0], b.ensemble.members[0]);
  EXPECT_EQ(a.ensemble.members[1], b.ensemble.members[1]);
  EXPECT_FALSE(a.ensemble.members[0] == a.ensemble.members[1]);
  o.members = 1;
  EXPECT_THROW(train_ensemble(set, nullptr, o), InvalidArgument);
  EXPECT_NO_THROW(train_members(set, nullptr, o));
}

TEST(PredictBatch, IndependentOfWorkersAndKeepsSamples) {
  const auto set = small_set(400);
  EnsembleTrainOptions o;
  o.spec = HeadSpec::mdn(3);
  o.members = 3;
  o.hidden = 8;
  o.train.epochs = 1;
  const auto ens = train_ensemble(set, nullptr, o).ensemble;
  std::vector<std::size_t> idx(50);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const Matrix x = input_matrix(set, idx);
  PredictOptions p;
  p.samples_per_member = 4;
  p.keep_samples = true;
  p.seed = 7;
  const auto a = predict_batch(ens, x, p);
  p.workers = 3;
  const auto b = predict_batch(ens, x, p);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.samples_per_voxel, 12u);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t v = 0; v < a.size(); ++v)
    for (std::size_t q = 0; q < kNumParams; ++q) {
      EXPECT_GT(a.au[v][q], 0.0);
      EXPECT_GE(a.eu[v][q], 0.0);
    }
  // Voxel 10 alone matches its in-batch estimate up to summation order.
  const auto single = predict_batch(ens, x.middleCols(10, 1), p);
  for (std::size_t q = 0; q < kNumParams; ++q) EXPECT_NEAR(single.map[0][q], a.map[10][q], 1e-12);
}

TEST(PredictBatch, PointEnsembleHasNoUncertainty) {
  const auto set = small_set(300);
  EnsembleTrainOptions o;
  o.spec = HeadSpec::point();
  o.members = 2;
  o.hidden = 8;
  o.train.epochs = 1;
  const auto ens = train_ensemble(set, nullptr, o).ensemble;
  std::vector<std::size_t> idx{0, 1, 2};
  PredictOptions p;
  p.keep_samples = true;
  const auto out = predict_batch(ens, input_matrix(set, idx), p);
  EXPECT_TRUE(std::isnan(out.au[0][0]));
  EXPECT_TRUE(std::isnan(out.eu[2][2]));
  EXPECT_EQ(out.samples_per_voxel, 0u);
  EXPECT_TRUE(PriorRanges{}[0].contains(out.map[0].d));
}
