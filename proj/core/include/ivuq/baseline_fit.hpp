#pragma once

// Classical segmented least-squares IVIM fit, used as a deterministic
// comparator for the networks.

#include <cstddef>
#include <span>

#include "ivuq/ivim_model.hpp"

namespace ivuq {

struct FitBounds {
  Range d{0.0, 0.005};
  Range f{0.0, 1.0};
  Range d_star{0.0, 0.5};
};

struct FitOptions {
  double b_threshold = 200.0;  // s/mm^2; samples above it feed the log-linear D stage
  /// Polish the segmented estimate with a bounded Levenberg-Marquardt pass on
  /// all three parameters; kept only when it lowers the residual.
  bool refine = true;
  std::size_t max_refine_iterations = 200;
  FitBounds bounds;
};

struct FitResult {
  IvimParams params;
  double residual = 0.0;  // sum of squared errors against the normalized signal
  bool converged = false;
  std::size_t iterations = 0;
};

/// Stage 1: log-linear fit of samples with b > threshold gives D and the
/// intercept (f = 1 - intercept). Stage 2: bounded Brent search for D* with D
/// and f frozen. Non-positive high-b samples are dropped and the result is
/// marked non-converged with the stage-1 estimate only.
FitResult fit_segmented(std::span<const double> bvalues, std::span<const double> signal,
                        const FitOptions& options = {});
FitResult fit_segmented(const SignalRecord& record, const FitOptions& options = {});

}  // namespace ivuq
