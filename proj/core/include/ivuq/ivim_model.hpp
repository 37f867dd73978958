#pragma once

// Bi-exponential IVIM signal model, Rician noise and b=0 normalization.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ivuq/rng.hpp"

namespace ivuq {

inline constexpr std::size_t kNumParams = 3;

/// Index of each IVIM parameter inside triples and per-parameter arrays.
enum class Param : std::size_t { D = 0, F = 1, DStar = 2 };

inline constexpr std::array<const char*, kNumParams> kParamNames{"D", "f", "Dstar"};

/// (D, f, D*) in physical units: mm^2/s, fraction, mm^2/s.
struct IvimParams {
  double d = 0.0;
  double f = 0.0;
  double d_star = 0.0;

  double operator[](std::size_t i) const { return i == 0 ? d : (i == 1 ? f : d_star); }
  double& operator[](std::size_t i) { return i == 0 ? d : (i == 1 ? f : d_star); }
  std::array<double, kNumParams> as_array() const { return {d, f, d_star}; }
  static IvimParams from_array(const std::array<double, kNumParams>& a) { return {a[0], a[1], a[2]}; }
  bool operator==(const IvimParams&) const = default;
};

/// Closed interval used to scale a parameter into [0, 1].
struct Range {
  double min = 0.0;
  double max = 1.0;

  double width() const { return max - min; }
  double normalize(double v) const { return (v - min) / (max - min); }
  double denormalize(double u) const { return min + u * (max - min); }
  bool contains(double v) const { return v >= min && v <= max; }
  bool operator==(const Range&) const = default;
};

/// Per-parameter prior box of the training simulation.
struct PriorRanges {
  std::array<Range, kNumParams> ranges{Range{0.0, 0.003}, Range{0.0, 0.4}, Range{0.003, 0.2}};

  const Range& operator[](std::size_t i) const { return ranges[i]; }
  Range& operator[](std::size_t i) { return ranges[i]; }

  /// Throws InvalidArgument unless every range has finite min < max.
  void validate() const;

  std::array<double, kNumParams> normalize(const IvimParams& p) const;
  IvimParams denormalize(const std::array<double, kNumParams>& u) const;
  bool operator==(const PriorRanges&) const = default;
};

/// Ordered b-values in s/mm^2. First entry is 0, strictly increasing.
class BValueSchedule {
 public:
  explicit BValueSchedule(std::vector<double> values);

  /// The 14-value protocol: 0, 15, 60, 100, 150, 170, 190, 220, 280, 440, 560, 700, 850, 1000.
  static BValueSchedule standard();

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::string to_string() const;
  bool operator==(const BValueSchedule&) const = default;

 private:
  std::vector<double> values_;
};

struct SignalRecord {
  BValueSchedule schedule;
  std::vector<double> s;
  bool normalized = false;
  bool noisy = false;
};

/// S(b) = s0 * (f exp(-b D*) + (1 - f) exp(-b D)) at every b of the schedule.
SignalRecord forward_signal(const IvimParams& params, const BValueSchedule& schedule, double s0 = 1.0);

/// Same model written into a caller-provided buffer (hot path for corpus generation).
void forward_signal_into(const IvimParams& params, std::span<const double> bvalues, double s0,
                         std::span<double> out);

/// Rician corruption with sigma = s[0] / snr, where s[0] is the clean b=0 amplitude.
SignalRecord add_rician_noise(const SignalRecord& record, double snr, Rng& rng);

/// Rician corruption at an explicit Gaussian sigma (sigma >= 0). Used for
/// background pixels whose clean amplitude is zero.
SignalRecord add_rician_noise_sigma(const SignalRecord& record, double sigma, Rng& rng);

/// In-place kernel: s_i <- sqrt((s_i + sigma n1)^2 + (sigma n2)^2), draws taken in order (n1, n2) per sample.
void rician_corrupt(std::span<double> s, double sigma, Rng& rng);

/// Divides by s[0]. Throws DegenerateVoxel when s[0] <= 0 (or is not finite).
SignalRecord normalize_signal(const SignalRecord& record);

/// In-place variant; returns false instead of throwing on a degenerate b=0 sample.
bool normalize_in_place(std::span<double> s) noexcept;

}  // namespace ivuq
