#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ivuq/errors.hpp"
#include "ivuq/synthdata.hpp"

using namespace ivuq;

namespace {

CorpusOptions small(std::size_t n, std::uint64_t seed) {
  CorpusOptions o;
  o.n = n;
  o.seed = seed;
  return o;
}

}  // namespace

TEST(TrainingSet, LabelsInsidePriorBox) {
  const auto set = sample_training_set(small(5000, 1));
  ASSERT_EQ(set.size(), 5000u);
  ASSERT_EQ(set.signals.size(), 5000u * 14u);
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t p = 0; p < kNumParams; ++p) {
      EXPECT_TRUE(set.prior_ranges[p].contains(set.labels[i][p]));
      EXPECT_GE(set.labels_normalized[i][p], 0.0);
      EXPECT_LE(set.labels_normalized[i][p], 1.0);
    }
    EXPECT_DOUBLE_EQ(set.signal(i)[0], 1.0);
  }
}

TEST(TrainingSet, DeterministicAndWorkerIndependent) {
  auto a = small(9000, 5);
  auto b = a;
  b.workers = 3;
  const auto s1 = sample_training_set(a);
  const auto s2 = sample_training_set(b);
  EXPECT_EQ(s1.signals, s2.signals);
  EXPECT_EQ(s1.labels, s2.labels);
  const auto s3 = sample_training_set(small(9000, 6));
  EXPECT_NE(s1.signals, s3.signals);
}

TEST(TrainingSet, NoiselessMatchesForwardModel) {
  auto o = small(50, 2);
  o.noiseless = true;
  const auto set = sample_training_set(o);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto clean = forward_signal(set.labels[i], set.schedule);
    for (std::size_t b = 0; b < set.n_b(); ++b) EXPECT_NEAR(set.signal(i)[b], clean.s[b], 1e-14);
  }
}

TEST(TrainingSet, PriorMeanMatchesUniform) {
  const auto set = sample_training_set(small(20000, 9));
  double mean_f = 0.0;
  for (const auto& l : set.labels) mean_f += l.f;
  mean_f /= static_cast<double>(set.size());
  // U(0, 0.4): mean 0.2, sd 0.115; standard error ~8e-4
  EXPECT_NEAR(mean_f, 0.2, 0.004);
}

TEST(TrainingSet, RejectsZeroRecords) { EXPECT_THROW(sample_training_set(small(0, 1)), InvalidArgument); }

TEST(Split, DisjointAndComplete) {
  const auto s = split_indices(1001, 0.8, 3);
  EXPECT_EQ(s.train.size(), 800u);
  EXPECT_EQ(s.validation.size(), 201u);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.validation.begin(), s.validation.end());
  EXPECT_EQ(all.size(), 1001u);
  EXPECT_EQ(*all.rbegin(), 1000u);
  EXPECT_THROW(split_indices(10, 1.5, 0), InvalidArgument);
}

TEST(Split, SubsetsCarryRecords) {
  const auto set = sample_training_set(small(100, 4));
  const auto [tr, va] = split_train_validation(set, 0.5, 8);
  EXPECT_EQ(tr.size(), 50u);
  EXPECT_EQ(va.size(), 50u);
  const auto idx = split_indices(100, 0.5, 8);
  EXPECT_EQ(tr.labels[0], set.labels[idx.train[0]]);
}

TEST(SheppLogan, SixLabelsAndBackground) {
  const auto labels = shepp_logan_labels(76, 76);
  ASSERT_EQ(labels.size(), 76u * 76u);
  std::set<int> seen(labels.begin(), labels.end());
  EXPECT_EQ(seen, (std::set<int>{0, 1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(labels[0], 0);                    // corner outside the head
  EXPECT_NE(labels[38 * 76 + 38], 0);         // center inside
}

TEST(SheppLogan, LeftRightLateralEllipses) {
  const auto labels = shepp_logan_labels(128, 128);
  std::size_t left = 0, right = 0;
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x) {
      const int l = labels[y * 128 + x];
      if (l == 3) (x >= 64 ? right : left)++;
      if (l == 4) (x < 64 ? left : right)++;
    }
  EXPECT_GT(left, 0u);
  EXPECT_GT(right, 0u);
}

TEST(Phantom, RoiTruthConstantAndBackgroundNaN) {
  const auto ph = generate_phantom(50.0, PriorRanges{}, BValueSchedule::standard(), 11);
  ASSERT_EQ(ph.pixels(), 76u * 76u);
  EXPECT_EQ(ph.signals.size(), ph.pixels() * 14u);
  std::array<IvimParams, 7> roi{};
  std::array<bool, 7> have{};
  for (std::size_t i = 0; i < ph.pixels(); ++i) {
    const int l = ph.roi_label[i];
    if (l == 0) {
      EXPECT_TRUE(std::isnan(ph.truth[i].d));
      continue;
    }
    if (!have[l]) {
      roi[l] = ph.truth[i];
      have[l] = true;
    }
    EXPECT_EQ(ph.truth[i], roi[l]);
  }
  for (int l = 1; l <= 6; ++l) {
    ASSERT_TRUE(have[l]);
    for (std::size_t p = 0; p < kNumParams; ++p) EXPECT_TRUE(PriorRanges{}[p].contains(roi[l][p]));
  }
}

TEST(Phantom, DeterministicPerSeed) {
  const auto a = generate_phantom(25.0, PriorRanges{}, BValueSchedule::standard(), 4);
  const auto b = generate_phantom(25.0, PriorRanges{}, BValueSchedule::standard(), 4);
  const auto c = generate_phantom(25.0, PriorRanges{}, BValueSchedule::standard(), 5);
  EXPECT_EQ(a.signals, b.signals);
  EXPECT_NE(a.signals, c.signals);
}

TEST(Phantom, NoiseLevelMatchesSnr) {
  const auto ph = generate_phantom(20.0, PriorRanges{}, BValueSchedule::standard(), 12);
  // Background magnitude is Rayleigh with sigma = 1/snr.
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < ph.pixels(); ++i)
    if (ph.is_background(i))
      for (double v : ph.signal(i)) {
        sum += v;
        ++n;
      }
  EXPECT_NEAR(sum / static_cast<double>(n), 1.2533141373155 / 20.0, 0.002);
}
