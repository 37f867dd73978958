#pragma once

// Accuracy (MdAE, MdB, RCV) and predictive-distribution quality metrics
// (prediction intervals, PICP, calibration curve, miscalibration area,
// PINAW, CRPS). Quantiles use linear interpolation between order statistics
// (Hyndman-Fan type 7).

#include <cstddef>
#include <span>
#include <vector>

namespace ivuq {

inline constexpr double kRcvScale = 1.486;

double median(std::span<const double> values);
/// Unscaled median absolute deviation from the median.
double mad(std::span<const double> values);

struct MedianMad {
  double median = 0.0;
  double mad = 0.0;
  std::size_t count = 0;
};

/// NaN entries are skipped; an empty input yields NaN/NaN with count 0.
MedianMad median_mad(std::span<const double> values);

/// Relative error metrics skip voxels with truth == 0 and report how many.
struct RelativeMetric {
  double value = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;
};

/// median(|pred - truth| / truth)
RelativeMetric mdae(std::span<const double> pred, std::span<const double> truth);
/// median((pred - truth) / truth)
RelativeMetric mdb(std::span<const double> pred, std::span<const double> truth);

/// 1.486 * MAD / median. Throws EmptyRoi on empty input and UndefinedMetric on a zero median.
double rcv(std::span<const double> values);

/// Type-7 quantile of ascending `sorted` at probability p in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double width() const { return upper - lower; }
  bool contains(double y) const { return y >= lower && y <= upper; }
};

/// Central gamma% interval: [(100-gamma)/2, (100+gamma)/2] percentiles. Needs >= 2 samples.
Interval prediction_interval(std::span<const double> samples, double gamma_percent);
Interval prediction_interval_sorted(std::span<const double> sorted, double gamma_percent);

/// Fraction of truths inside their closed interval.
double picp(std::span<const Interval> intervals, std::span<const double> truths);

/// Levels 5, 10, ..., 95 (percent).
std::vector<double> default_levels();

struct CalibrationCurve {
  std::vector<double> nominal_levels;  // percent, strictly increasing
  std::vector<double> observed_picp;   // fractions in [0, 1]
  double miscalibration_area = 0.0;    // fraction of the unit square
};

/// Trapezoidal integral of |observed - nominal| over nominal in [0, 1]. The
/// gap at the first and last level is held constant out to 0 and 1.
double miscalibration_area(const CalibrationCurve& curve);

/// Builds a curve and fills its miscalibration area.
CalibrationCurve make_calibration_curve(std::vector<double> nominal_levels, std::vector<double> observed_picp);

/// Mean interval width divided by the target range R.
double pinaw(std::span<const Interval> intervals, double range);

/// Energy-form CRPS: mean|x_i - y| - 1/(2 S^2) sum_ij |x_i - x_j|.
double crps_empirical(std::span<const double> samples, double y);
/// Same estimator on ascending samples, O(S).
double crps_sorted(std::span<const double> sorted, double y);

}  // namespace ivuq
