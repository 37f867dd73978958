#include <gtest/gtest.h>

#include <cmath>

#include "ivuq/baseline_fit.hpp"
#include "ivuq/errors.hpp"

using namespace ivuq;

namespace {

const BValueSchedule& schedule() {
  static const auto s = BValueSchedule::standard();
  return s;
}

}  // namespace

TEST(Segmented, RecoversTypicalTissue) {
  const IvimParams truth{0.0012, 0.15, 0.04};
  const auto fit = fit_segmented(forward_signal(truth, schedule()));
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.params.d, truth.d, 1e-3 * truth.d);
  EXPECT_NEAR(fit.params.f, truth.f, 1e-2);
  EXPECT_NEAR(fit.params.d_star, truth.d_star, 0.05 * truth.d_star);
  EXPECT_LT(fit.residual, 1e-12);
}

TEST(Segmented, WithoutRefinementIsClose) {
  const IvimParams truth{0.001, 0.2, 0.08};
  FitOptions o;
  o.refine = false;
  const auto fit = fit_segmented(forward_signal(truth, schedule()), o);
  EXPECT_NEAR(fit.params.d, truth.d, 0.05 * truth.d);
  EXPECT_NEAR(fit.params.f, truth.f, 0.03);
}

TEST(Segmented, PureDiffusion) {
  const auto fit = fit_segmented(forward_signal({0.002, 0.0, 0.05}, schedule()));
  EXPECT_NEAR(fit.params.d, 0.002, 2e-6);
  EXPECT_NEAR(fit.params.f, 0.0, 1e-2);
}

TEST(Segmented, ScaleInvariantAfterNormalization) {
  const IvimParams truth{0.0009, 0.1, 0.02};
  const auto a = fit_segmented(normalize_signal(forward_signal(truth, schedule(), 250.0)));
  const auto b = fit_segmented(forward_signal(truth, schedule()));
  EXPECT_NEAR(a.params.d, b.params.d, 1e-12);
}

TEST(Segmented, ParametersStayInBounds) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto noisy = normalize_signal(add_rician_noise(forward_signal({0.001, 0.3, 0.1}, schedule()), 5.0, rng));
    const auto fit = fit_segmented(noisy);
    FitBounds b;
    EXPECT_TRUE(b.d.contains(fit.params.d));
    EXPECT_TRUE(b.f.contains(fit.params.f));
    EXPECT_TRUE(b.d_star.contains(fit.params.d_star));
  }
}

TEST(Segmented, NonPositiveHighBSamples) {
  std::vector<double> s(schedule().size(), 0.0);
  s[0] = 1.0;
  const auto fit = fit_segmented(schedule().values(), s);
  EXPECT_FALSE(fit.converged);
}

TEST(Segmented, RejectsMismatchedInput) {
  EXPECT_THROW(fit_segmented(schedule().values(), std::vector<double>(3, 1.0)), InvalidArgument);
  const std::vector<double> b{0, 100, 300, 400};
  EXPECT_THROW(fit_segmented(b, std::vector<double>(4, 1.0)), InvalidArgument);
}
