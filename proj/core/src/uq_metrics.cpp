#include "ivuq/uq_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ivuq/errors.hpp"

namespace ivuq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> sorted_copy(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  return s;
}

template <class Fn>
RelativeMetric relative_metric(std::span<const double> pred, std::span<const double> truth, Fn fn) {
  if (pred.size() != truth.size()) throw InvalidArgument("prediction and truth lengths differ");
  std::vector<double> rel;
  rel.reserve(pred.size());
  RelativeMetric out;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth[i] == 0.0) {
      ++out.excluded;
      continue;
    }
    rel.push_back(fn(pred[i], truth[i]));
  }
  out.used = rel.size();
  out.value = rel.empty() ? kNaN : median(rel);
  return out;
}

}  // namespace

double median(std::span<const double> values) {
  if (values.empty()) return kNaN;
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double mad(std::span<const double> values) {
  if (values.empty()) return kNaN;
  const double m = median(values);
  std::vector<double> dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) dev[i] = std::abs(values[i] - m);
  return median(dev);
}

MedianMad median_mad(std::span<const double> values) {
  std::vector<double> finite;
  finite.reserve(values.size());
  for (double v : values)
    if (!std::isnan(v)) finite.push_back(v);
  if (finite.empty()) return {kNaN, kNaN, 0};
  return {median(finite), mad(finite), finite.size()};
}

RelativeMetric mdae(std::span<const double> pred, std::span<const double> truth) {
  return relative_metric(pred, truth, [](double p, double t) { return std::abs(p - t) / t; });
}

RelativeMetric mdb(std::span<const double> pred, std::span<const double> truth) {
  return relative_metric(pred, truth, [](double p, double t) { return (p - t) / t; });
}

double rcv(std::span<const double> values) {
  if (values.empty()) throw EmptyRoi("RCV of an empty region");
  const double m = median(values);
  if (m == 0.0) throw UndefinedMetric("RCV undefined: region median is zero");
  return kRcvScale * mad(values) / m;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("quantile probability must lie in [0, 1]");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Interval prediction_interval_sorted(std::span<const double> sorted, double gamma) {
  if (sorted.size() < 2) throw InvalidArgument("prediction interval needs at least 2 samples");
  if (!(gamma > 0.0 && gamma <= 100.0)) throw InvalidArgument("interval level must lie in (0, 100]");
  return {quantile_sorted(sorted, (100.0 - gamma) / 200.0), quantile_sorted(sorted, (100.0 + gamma) / 200.0)};
}

Interval prediction_interval(std::span<const double> samples, double gamma) {
  const auto s = sorted_copy(samples);
  return prediction_interval_sorted(s, gamma);
}

double picp(std::span<const Interval> intervals, std::span<const double> truths) {
  if (intervals.size() != truths.size()) throw InvalidArgument("interval and truth counts differ");
  if (intervals.empty()) return kNaN;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < intervals.size(); ++i) covered += intervals[i].contains(truths[i]) ? 1 : 0;
  return static_cast<double>(covered) / static_cast<double>(intervals.size());
}

std::vector<double> default_levels() {
  std::vector<double> levels;
  for (int g = 5; g <= 95; g += 5) levels.push_back(g);
  return levels;
}

double miscalibration_area(const CalibrationCurve& curve) {
  const auto& nom = curve.nominal_levels;
  const auto& obs = curve.observed_picp;
  if (nom.size() != obs.size()) throw InvalidArgument("calibration curve arrays differ in length");
  if (nom.size() < 2) throw InvalidArgument("calibration curve needs at least 2 levels");
  std::vector<double> x(nom.size()), gap(nom.size());
  for (std::size_t i = 0; i < nom.size(); ++i) {
    x[i] = nom[i] / 100.0;
    if (i > 0 && !(x[i] > x[i - 1])) throw InvalidArgument("calibration levels must be strictly increasing");
    gap[i] = std::abs(obs[i] - x[i]);
  }
  double area = gap.front() * x.front() + gap.back() * (1.0 - x.back());
  for (std::size_t i = 1; i < x.size(); ++i) area += 0.5 * (gap[i] + gap[i - 1]) * (x[i] - x[i - 1]);
  return area;
}

CalibrationCurve make_calibration_curve(std::vector<double> nominal_levels, std::vector<double> observed_picp) {
  CalibrationCurve c{std::move(nominal_levels), std::move(observed_picp), 0.0};
  c.miscalibration_area = miscalibration_area(c);
  return c;
}

double pinaw(std::span<const Interval> intervals, double range) {
  if (!(range > 0.0)) throw InvalidArgument("PINAW range must be positive");
  if (intervals.empty()) return kNaN;
  double total = 0.0;
  for (const Interval& iv : intervals) total += iv.width();
  return total / (static_cast<double>(intervals.size()) * range);
}

double crps_sorted(std::span<const double> x, double y) {
  if (x.size() < 2) throw InvalidArgument("CRPS needs at least 2 samples");
  const auto n = static_cast<double>(x.size());
  double abs_err = 0.0;
  double spread = 0.0;  // sum_{i<j} (x_j - x_i) = sum_i (2i - n + 1) x_i
  for (std::size_t i = 0; i < x.size(); ++i) {
    abs_err += std::abs(x[i] - y);
    spread += (2.0 * static_cast<double>(i) - n + 1.0) * x[i];
  }
  // sum_ij |x_i - x_j| = 2 * spread
  return std::max(0.0, abs_err / n - spread / (n * n));
}

double crps_empirical(std::span<const double> samples, double y) {
  const auto s = sorted_copy(samples);
  return crps_sorted(s, y);
}

}  // namespace ivuq
