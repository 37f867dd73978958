#include "ivuq/prob_heads.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ivuq/errors.hpp"

namespace ivuq {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

struct RawLayout {
  std::size_t k;
  bool logits;
  std::size_t logit(std::size_t p, std::size_t c) const { return p * k + c; }
  std::size_t mean(std::size_t p, std::size_t c) const { return (logits ? 3 * k : 0) + p * k + c; }
  std::size_t sd(std::size_t p, std::size_t c) const { return (logits ? 6 * k : 3 * k) + p * k + c; }
};

RawLayout layout_of(const HeadSpec& spec) { return {spec.k, spec.has_logits()}; }

void check_width(std::span<const double> raw, const HeadSpec& spec) {
  if (raw.size() != spec.output_width())
    throw InvalidArgument("raw output has " + std::to_string(raw.size()) + " entries, head expects " +
                          std::to_string(spec.output_width()));
}

}  // namespace

std::string to_string(HeadKind kind) {
  switch (kind) {
    case HeadKind::Point: return "point";
    case HeadKind::Gaussian: return "gaussian";
    case HeadKind::Mdn: return "mdn";
  }
  return "unknown";
}

HeadKind parse_head_kind(const std::string& text) {
  if (text == "point" || text == "mlp") return HeadKind::Point;
  if (text == "gaussian") return HeadKind::Gaussian;
  if (text == "mdn") return HeadKind::Mdn;
  throw InvalidArgument("unknown head kind '" + text + "' (expected point, gaussian or mdn)");
}

std::size_t HeadSpec::output_width() const {
  switch (kind) {
    case HeadKind::Point: return kNumParams;
    case HeadKind::Gaussian: return 2 * kNumParams;
    case HeadKind::Mdn: return k == 1 ? 2 * kNumParams : 3 * kNumParams * k;
  }
  return 0;
}

void HeadSpec::validate() const {
  if (k < 1) throw InvalidArgument("mixture component count must be >= 1");
  if (kind != HeadKind::Mdn && k != 1) throw InvalidArgument(to_string(kind) + " head requires k == 1");
}

Triple decode_point(std::span<const double> raw) {
  check_width(raw, HeadSpec::point());
  return {sigmoid(raw[0]), sigmoid(raw[1]), sigmoid(raw[2])};
}

MixturePrediction decode_mixture(std::span<const double> raw, const HeadSpec& spec) {
  if (!spec.probabilistic()) throw InvalidArgument("point head has no mixture output");
  check_width(raw, spec);
  const RawLayout lay = layout_of(spec);
  MixturePrediction out;
  for (std::size_t p = 0; p < kNumParams; ++p) {
    Mixture1D& mix = out[p];
    mix.weights.resize(spec.k);
    mix.means.resize(spec.k);
    mix.stddevs.resize(spec.k);
    if (lay.logits) {
      double amax = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < spec.k; ++c) amax = std::max(amax, raw[lay.logit(p, c)]);
      double total = 0.0;
      for (std::size_t c = 0; c < spec.k; ++c) total += (mix.weights[c] = std::exp(raw[lay.logit(p, c)] - amax));
      for (double& w : mix.weights) w /= total;
    } else {
      mix.weights[0] = 1.0;
    }
    for (std::size_t c = 0; c < spec.k; ++c) {
      mix.means[c] = sigmoid(raw[lay.mean(p, c)]);
      mix.stddevs[c] = softplus(raw[lay.sd(p, c)]) + kSigmaFloor;
    }
  }
  return out;
}

HeadOutput decode_head(std::span<const double> raw, const HeadSpec& spec) {
  if (spec.kind == HeadKind::Point) return decode_point(raw);
  return decode_mixture(raw, spec);
}

double loss_mse(const Triple& pred, const Triple& label) {
  double s = 0.0;
  for (std::size_t p = 0; p < kNumParams; ++p) s += (pred[p] - label[p]) * (pred[p] - label[p]);
  return s;
}

double loss_mse(std::span<const Triple> pred, std::span<const Triple> label) {
  if (pred.size() != label.size() || pred.empty()) throw InvalidArgument("mse needs equal, non-empty batches");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += loss_mse(pred[i], label[i]);
  return s / static_cast<double>(pred.size());
}

double loss_nll_mixture(const MixturePrediction& pred, const Triple& label) {
  double nll = 0.0;
  for (std::size_t p = 0; p < kNumParams; ++p) {
    const Mixture1D& mix = pred[p];
    std::vector<double> terms(mix.k());
    double tmax = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < mix.k(); ++c) {
      const double z = (label[p] - mix.means[c]) / mix.stddevs[c];
      terms[c] = std::log(mix.weights[c]) - std::log(mix.stddevs[c]) - kHalfLog2Pi - 0.5 * z * z;
      tmax = std::max(tmax, terms[c]);
    }
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - tmax);
    nll -= tmax + std::log(acc);
  }
  return nll;
}

double loss_nll_gaussian(const Triple& mean, const Triple& stddev, const Triple& label) {
  double nll = 0.0;
  for (std::size_t p = 0; p < kNumParams; ++p) {
    const double z = (label[p] - mean[p]) / stddev[p];
    nll += std::log(stddev[p]) + kHalfLog2Pi + 0.5 * z * z;
  }
  return nll;
}

namespace {

double point_loss(std::span<const double> raw, const Triple& label, std::span<double> grad) {
  double loss = 0.0;
  for (std::size_t p = 0; p < kNumParams; ++p) {
    const double y = sigmoid(raw[p]);
    const double r = y - label[p];
    loss += r * r;
    if (!grad.empty()) grad[p] = 2.0 * r * y * (1.0 - y);
  }
  return loss;
}

double gaussian_loss(std::span<const double> raw, const Triple& label, std::span<double> grad) {
  Triple mean{}, sd{};
  for (std::size_t p = 0; p < kNumParams; ++p) {
    mean[p] = sigmoid(raw[p]);
    sd[p] = softplus(raw[kNumParams + p]) + kSigmaFloor;
  }
  if (!grad.empty()) {
    for (std::size_t p = 0; p < kNumParams; ++p) {
      const double r = label[p] - mean[p];
      const double d_mean = -r / (sd[p] * sd[p]);
      const double d_sd = 1.0 / sd[p] - r * r / (sd[p] * sd[p] * sd[p]);
      grad[p] = d_mean * mean[p] * (1.0 - mean[p]);
      grad[kNumParams + p] = d_sd * sigmoid(raw[kNumParams + p]);
    }
  }
  return loss_nll_gaussian(mean, sd, label);
}

double mixture_loss(const HeadSpec& spec, std::span<const double> raw, const Triple& label,
                    std::span<double> grad) {
  const MixturePrediction pred = decode_mixture(raw, spec);
  if (grad.empty()) return loss_nll_mixture(pred, label);

  const RawLayout lay = layout_of(spec);
  double nll = 0.0;
  std::vector<double> terms(spec.k);
  for (std::size_t p = 0; p < kNumParams; ++p) {
    const Mixture1D& mix = pred[p];
    double tmax = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < spec.k; ++c) {
      const double z = (label[p] - mix.means[c]) / mix.stddevs[c];
      terms[c] = std::log(mix.weights[c]) - std::log(mix.stddevs[c]) - kHalfLog2Pi - 0.5 * z * z;
      tmax = std::max(tmax, terms[c]);
    }
    double acc = 0.0;
    for (std::size_t c = 0; c < spec.k; ++c) acc += std::exp(terms[c] - tmax);
    const double lse = tmax + std::log(acc);
    nll -= lse;

    for (std::size_t c = 0; c < spec.k; ++c) {
      const double resp = std::exp(terms[c] - lse);
      const double mu = mix.means[c];
      const double s = mix.stddevs[c];
      const double r = label[p] - mu;
      if (lay.logits) grad[lay.logit(p, c)] = mix.weights[c] - resp;
      grad[lay.mean(p, c)] = -resp * r / (s * s) * mu * (1.0 - mu);
      grad[lay.sd(p, c)] = resp * (1.0 / s - r * r / (s * s * s)) * sigmoid(raw[lay.sd(p, c)]);
    }
  }
  return nll;
}

}  // namespace

double head_loss(const HeadSpec& spec, std::span<const double> raw, const Triple& label, std::span<double> grad) {
  check_width(raw, spec);
  if (!grad.empty() && grad.size() != raw.size()) throw InvalidArgument("gradient buffer size mismatch");
  switch (spec.kind) {
    case HeadKind::Point: return point_loss(raw, label, grad);
    case HeadKind::Gaussian: return gaussian_loss(raw, label, grad);
    case HeadKind::Mdn: return mixture_loss(spec, raw, label, grad);
  }
  return 0.0;
}

BatchLoss make_batch_loss(const HeadSpec& spec) {
  spec.validate();
  return [spec](const Matrix& raw, const Matrix& labels, Matrix* grad) {
    const Eigen::Index batch = raw.cols();
    if (grad) grad->resize(raw.rows(), batch);
    const double inv = 1.0 / static_cast<double>(batch);
    double total = 0.0;
    for (Eigen::Index j = 0; j < batch; ++j) {
      std::span<const double> col(raw.col(j).data(), static_cast<std::size_t>(raw.rows()));
      const Triple label{labels(0, j), labels(1, j), labels(2, j)};
      if (grad) {
        std::span<double> g(grad->col(j).data(), static_cast<std::size_t>(raw.rows()));
        total += head_loss(spec, col, label, g);
        for (double& v : g) v *= inv;
      } else {
        total += head_loss(spec, col, label);
      }
    }
    return total * inv;
  };
}

Triple map_normalized(const MixturePrediction& pred) {
  Triple out{};
  for (std::size_t p = 0; p < kNumParams; ++p) {
    const Mixture1D& mix = pred[p];
    std::size_t best = 0;
    for (std::size_t c = 1; c < mix.k(); ++c)
      if (mix.weights[c] > mix.weights[best]) best = c;
    out[p] = mix.means[best];
  }
  return out;
}

IvimParams map_point_estimate(const MixturePrediction& pred, const PriorRanges& ranges) {
  return ranges.denormalize(map_normalized(pred));
}

void sample_mixture(const Mixture1D& mix, std::size_t count, Rng& rng, std::vector<double>& out) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = unit(rng);
    std::size_t c = 0;
    double cum = mix.weights[0];
    while (u >= cum && c + 1 < mix.k()) cum += mix.weights[++c];
    out.push_back(mix.means[c] + mix.stddevs[c] * gauss(rng));
  }
}

std::vector<Triple> sample_prediction(const MixturePrediction& pred, std::size_t count, Rng& rng) {
  if (count == 0) throw InvalidArgument("sample count must be >= 1");
  std::array<std::vector<double>, kNumParams> per_param;
  for (std::size_t p = 0; p < kNumParams; ++p) {
    per_param[p].reserve(count);
    sample_mixture(pred[p], count, rng, per_param[p]);
  }
  std::vector<Triple> out(count);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t p = 0; p < kNumParams; ++p) out[i][p] = per_param[p][i];
  return out;
}

}  // namespace ivuq
