#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ivuq/errors.hpp"
#include "ivuq/rng.hpp"
#include "ivuq/uq_metrics.hpp"

using namespace ivuq;

namespace {

std::vector<double> one_to(int n) {
  std::vector<double> v(n);
  std::iota(v.begin(), v.end(), 1.0);
  return v;
}

double gaussian_crps(double mu, double sigma, double y) {
  const double z = (y - mu) / sigma;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
  const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
  return sigma * (z * (2.0 * cdf - 1.0) + 2.0 * pdf - 1.0 / std::sqrt(M_PI));
}

}  // namespace

TEST(Robust, MedianAndMad) {
  EXPECT_DOUBLE_EQ(median(std::vector<double>{3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median(std::vector<double>{4, 1, 2, 3}), 2.5);
  EXPECT_DOUBLE_EQ(mad(std::vector<double>{1, 2, 3, 4, 100}), 1.0);
  const auto mm = median_mad(std::vector<double>{1, NAN, 3});
  EXPECT_DOUBLE_EQ(mm.median, 2.0);
  EXPECT_EQ(mm.count, 2u);
  EXPECT_TRUE(std::isnan(median_mad(std::vector<double>{}).median));
}

TEST(Relative, MdaeAndMdbExcludeZeroTruth) {
  const std::vector<double> pred{1.1, 0.8, 5.0, 2.0};
  const std::vector<double> truth{1.0, 1.0, 0.0, 2.0};
  const auto e = mdae(pred, truth);
  EXPECT_NEAR(e.value, 0.1, 1e-12);
  EXPECT_EQ(e.used, 3u);
  EXPECT_EQ(e.excluded, 1u);
  EXPECT_NEAR(mdb(pred, truth).value, 0.0, 1e-12);
  EXPECT_THROW(mdae(pred, std::vector<double>{1.0}), InvalidArgument);
}

TEST(Rcv, Oracle) {
  EXPECT_NEAR(rcv(std::vector<double>{1, 2, 3}), 0.743, 1e-15);
  EXPECT_THROW(rcv(std::vector<double>{}), EmptyRoi);
  EXPECT_THROW(rcv(std::vector<double>{0, 0, 1}), UndefinedMetric);
}

TEST(Quantile, Type7) {
  const auto v = one_to(10);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 1.0), 10.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.5), 5.5);
  EXPECT_NEAR(quantile_sorted(v, 0.1), 1.9, 1e-12);
}

TEST(Interval, OracleValues) {
  auto v = one_to(1000);
  std::reverse(v.begin(), v.end());
  const auto i90 = prediction_interval(v, 90.0);
  EXPECT_NEAR(i90.lower, 50.95, 1e-9);
  EXPECT_NEAR(i90.upper, 950.05, 1e-9);
  const auto i95 = prediction_interval(v, 95.0);
  EXPECT_NEAR(i95.lower, 25.975, 1e-9);
  EXPECT_NEAR(i95.upper, 975.025, 1e-9);
  EXPECT_THROW(prediction_interval(std::vector<double>{1.0}, 90.0), InvalidArgument);
}

TEST(Interval, ClosedBoundsAndPicp) {
  const std::vector<Interval> iv{{0.0, 1.0}, {0.0, 1.0}, {2.0, 3.0}, {2.0, 3.0}};
  const std::vector<double> y{1.0, 0.0, 3.5, 2.5};
  EXPECT_DOUBLE_EQ(picp(iv, y), 0.75);
  EXPECT_DOUBLE_EQ(pinaw(iv, 2.0), 0.5);
  EXPECT_THROW(pinaw(iv, 0.0), InvalidArgument);
}

TEST(Calibration, PerfectCurveHasZeroArea) {
  const auto levels = default_levels();
  ASSERT_EQ(levels.size(), 19u);
  std::vector<double> obs;
  for (double l : levels) obs.push_back(l / 100.0);
  EXPECT_NEAR(make_calibration_curve(levels, obs).miscalibration_area, 0.0, 1e-15);
}

TEST(Calibration, ConstantOffsetArea) {
  std::vector<double> obs;
  for (double l : default_levels()) obs.push_back(l / 100.0 + 0.1);
  EXPECT_NEAR(make_calibration_curve(default_levels(), obs).miscalibration_area, 0.1, 1e-12);
}

TEST(Calibration, RejectsBadLevels) {
  EXPECT_THROW(make_calibration_curve({50.0, 40.0}, {0.5, 0.4}), InvalidArgument);
  EXPECT_THROW(make_calibration_curve({50.0}, {0.5}), InvalidArgument);
}

TEST(Crps, SortedEqualsQuadratic) {
  Rng rng(1);
  std::normal_distribution<double> z;
  std::vector<double> s(300);
  for (double& v : s) v = z(rng);
  const double quad = crps_empirical(s, 0.4);
  std::sort(s.begin(), s.end());
  EXPECT_NEAR(crps_sorted(s, 0.4), quad, 1e-12);
}

TEST(Crps, PointMassIsAbsoluteError) {
  const std::vector<double> s(10, 2.0);
  EXPECT_NEAR(crps_sorted(s, 5.0), 3.0, 1e-15);
}

TEST(Crps, ApproachesGaussianClosedForm) {
  Rng rng(2);
  std::normal_distribution<double> z(1.0, 0.5);
  std::vector<double> s(50000);
  for (double& v : s) v = z(rng);
  std::sort(s.begin(), s.end());
  const double expect = gaussian_crps(1.0, 0.5, 1.7);
  EXPECT_NEAR(crps_sorted(s, 1.7), expect, 0.01 * expect);
}
