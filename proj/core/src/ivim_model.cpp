#include "ivuq/ivim_model.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "ivuq/errors.hpp"

namespace ivuq {

void PriorRanges::validate() const {
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const Range& r = ranges[i];
    if (!std::isfinite(r.min) || !std::isfinite(r.max) || !(r.min < r.max)) {
      std::ostringstream msg;
      msg << "invalid prior range for " << kParamNames[i] << ": [" << r.min << ", " << r.max << "]";
      throw InvalidArgument(msg.str());
    }
  }
}

std::array<double, kNumParams> PriorRanges::normalize(const IvimParams& p) const {
  return {ranges[0].normalize(p.d), ranges[1].normalize(p.f), ranges[2].normalize(p.d_star)};
}

IvimParams PriorRanges::denormalize(const std::array<double, kNumParams>& u) const {
  return {ranges[0].denormalize(u[0]), ranges[1].denormalize(u[1]), ranges[2].denormalize(u[2])};
}

BValueSchedule::BValueSchedule(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidArgument("b-value schedule is empty");
  if (values_.front() != 0.0) throw InvalidArgument("b-value schedule must start at b=0");
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || !(values_[i] > values_[i - 1]))
      throw InvalidArgument("b-values must be finite and strictly increasing: " + to_string());
  }
}

BValueSchedule BValueSchedule::standard() {
  return BValueSchedule({0, 15, 60, 100, 150, 170, 190, 220, 280, 440, 560, 700, 850, 1000});
}

std::string BValueSchedule::to_string() const {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < values_.size(); ++i) out << (i ? "," : "") << values_[i];
  return out.str();
}

void forward_signal_into(const IvimParams& p, std::span<const double> bvalues, double s0,
                         std::span<double> out) {
  for (std::size_t i = 0; i < bvalues.size(); ++i) {
    const double b = bvalues[i];
    out[i] = s0 * (p.f * std::exp(-b * p.d_star) + (1.0 - p.f) * std::exp(-b * p.d));
  }
}

SignalRecord forward_signal(const IvimParams& params, const BValueSchedule& schedule, double s0) {
  if (!std::isfinite(params.d) || !std::isfinite(params.f) || !std::isfinite(params.d_star))
    throw InvalidArgument("IVIM parameters must be finite");
  if (!std::isfinite(s0) || !(s0 > 0.0)) throw InvalidArgument("s0 must be positive and finite");

  SignalRecord rec{schedule, std::vector<double>(schedule.size()), false, false};
  forward_signal_into(params, schedule.values(), s0, rec.s);
  return rec;
}

void rician_corrupt(std::span<double> s, double sigma, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& v : s) {
    const double n1 = sigma * gauss(rng);
    const double n2 = sigma * gauss(rng);
    const double re = v + n1;
    v = std::sqrt(re * re + n2 * n2);
  }
}

SignalRecord add_rician_noise_sigma(const SignalRecord& record, double sigma, Rng& rng) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidArgument("noise sigma must be finite and >= 0");
  if (record.noisy) throw InvalidArgument("record is already noise-corrupted");
  SignalRecord out = record;
  rician_corrupt(out.s, sigma, rng);
  out.noisy = true;
  return out;
}

SignalRecord add_rician_noise(const SignalRecord& record, double snr, Rng& rng) {
  if (!(snr > 0.0)) throw InvalidArgument("snr must be > 0");
  if (record.s.empty()) throw InvalidArgument("empty signal record");
  const double sigma = record.s.front() / snr;
  return add_rician_noise_sigma(record, sigma, rng);
}

bool normalize_in_place(std::span<double> s) noexcept {
  if (s.empty()) return false;
  const double s0 = s.front();
  if (!(s0 > 0.0) || !std::isfinite(s0)) return false;
  for (double& v : s) v /= s0;
  return true;
}

SignalRecord normalize_signal(const SignalRecord& record) {
  SignalRecord out = record;
  if (!normalize_in_place(out.s)) throw DegenerateVoxel("b=0 signal is not positive; voxel cannot be normalized");
  out.normalized = true;
  return out;
}

}  // namespace ivuq
