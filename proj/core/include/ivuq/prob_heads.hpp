#pragma once

// Regression heads on top of the raw network output: point (sigmoid + MSE),
// heteroscedastic Gaussian, and K-component mixture density (MDN), with their
// losses, MAP extraction and sampling.
//
// Raw output layouts (parameter order D, f, D*):
//   point            [z_D, z_f, z_D*]
//   gaussian, mdn K=1 [u_p (3) | v_p (3)]
//   mdn K>1          [a_{p,k} (3K) | u_{p,k} (3K) | v_{p,k} (3K)], index p*K + k
// with weight = softmax_k(a), mean = sigmoid(u), stddev = softplus(v) + floor.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ivuq/ivim_model.hpp"
#include "ivuq/neuralnet.hpp"
#include "ivuq/rng.hpp"
#include "ivuq/synthdata.hpp"

namespace ivuq {

/// Lower bound added to every predicted stddev, in normalized [0,1] units.
inline constexpr double kSigmaFloor = 1e-4;

enum class HeadKind : std::uint32_t { Point = 0, Gaussian = 1, Mdn = 2 };

std::string to_string(HeadKind kind);
HeadKind parse_head_kind(const std::string& text);

struct HeadSpec {
  HeadKind kind = HeadKind::Mdn;
  std::size_t k = 10;

  static HeadSpec point() { return {HeadKind::Point, 1}; }
  static HeadSpec gaussian() { return {HeadKind::Gaussian, 1}; }
  static HeadSpec mdn(std::size_t k) { return {HeadKind::Mdn, k}; }

  bool probabilistic() const { return kind != HeadKind::Point; }
  bool has_logits() const { return kind == HeadKind::Mdn && k > 1; }
  std::size_t output_width() const;
  void validate() const;
  bool operator==(const HeadSpec&) const = default;
};

/// One-dimensional Gaussian mixture in normalized parameter space.
struct Mixture1D {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> stddevs;

  std::size_t k() const { return weights.size(); }
};

/// Independent mixtures for D, f and D*.
struct MixturePrediction {
  std::array<Mixture1D, kNumParams> params;

  std::size_t k() const { return params[0].k(); }
  const Mixture1D& operator[](std::size_t p) const { return params[p]; }
  Mixture1D& operator[](std::size_t p) { return params[p]; }
};

using HeadOutput = std::variant<Triple, MixturePrediction>;

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

Triple decode_point(std::span<const double> raw);
MixturePrediction decode_mixture(std::span<const double> raw, const HeadSpec& spec);
HeadOutput decode_head(std::span<const double> raw, const HeadSpec& spec);

/// Summed squared error across the three normalized parameters.
double loss_mse(const Triple& pred, const Triple& label);
/// Batch mean of the summed squared error.
double loss_mse(std::span<const Triple> pred, std::span<const Triple> label);

/// -sum_p log sum_k pi_k N(y_p | mu_k, sigma_k^2), log-sum-exp stabilized.
double loss_nll_mixture(const MixturePrediction& pred, const Triple& label);

/// Closed-form factorized Gaussian NLL: sum_p [log sigma_p + 0.5 log 2pi + 0.5 ((y_p - mu_p)/sigma_p)^2].
double loss_nll_gaussian(const Triple& mean, const Triple& stddev, const Triple& label);

/// Loss of one raw output vector under `spec`; fills d(loss)/d(raw) when
/// `grad_raw` is non-empty. Gaussian heads use the closed-form path, MDN
/// heads the mixture path.
double head_loss(const HeadSpec& spec, std::span<const double> raw, const Triple& label,
                 std::span<double> grad_raw = {});

/// Batch-mean loss adapter for the training loop.
BatchLoss make_batch_loss(const HeadSpec& spec);

/// Per parameter, mean of the highest-weight component (lowest index wins ties).
Triple map_normalized(const MixturePrediction& pred);
IvimParams map_point_estimate(const MixturePrediction& pred, const PriorRanges& ranges);

/// `count` draws per parameter: pick a component by weight, then draw from
/// its Gaussian. Samples are not clamped to [0, 1].
std::vector<Triple> sample_prediction(const MixturePrediction& pred, std::size_t count, Rng& rng);

/// Appends `count` draws of a single 1-D mixture to `out`.
void sample_mixture(const Mixture1D& mix, std::size_t count, Rng& rng, std::vector<double>& out);

}  // namespace ivuq
