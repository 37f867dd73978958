#include "ivuq/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "ivuq/errors.hpp"
#include "ivuq/parallel.hpp"
#include "ivuq/rng.hpp"

namespace ivuq {

namespace {

constexpr std::uint64_t kStreamCorpus = 0x636f72707573ULL;
constexpr std::uint64_t kStreamPhantomRoi = 0x726f69ULL;
constexpr std::uint64_t kStreamPhantomNoise = 0x6e6f697365ULL;
constexpr std::uint64_t kStreamPhantomSet = 0x7068616e746f6dULL;
constexpr std::size_t kCorpusChunk = 4096;

IvimParams draw_params(const PriorRanges& ranges, Rng& rng) {
  IvimParams p;
  for (std::size_t k = 0; k < kNumParams; ++k) {
    std::uniform_real_distribution<double> u(ranges[k].min, ranges[k].max);
    p[k] = u(rng);
  }
  return p;
}

struct Ellipse {
  double x0, y0, a, b, phi_deg;
  std::uint8_t label;
};

// Canonical Shepp-Logan geometry; later entries overwrite earlier ones.
constexpr std::array<Ellipse, 10> kEllipses{{
    {0.0, 0.0, 0.69, 0.92, 0.0, 1},
    {0.0, -0.0184, 0.6624, 0.874, 0.0, 2},
    {0.22, 0.0, 0.11, 0.31, -18.0, 3},
    {-0.22, 0.0, 0.16, 0.41, 18.0, 4},
    {0.0, 0.35, 0.21, 0.25, 0.0, 5},
    {0.0, 0.1, 0.046, 0.046, 0.0, 5},
    {0.0, -0.1, 0.046, 0.046, 0.0, 5},
    {-0.08, -0.605, 0.046, 0.023, 0.0, 6},
    {0.0, -0.606, 0.023, 0.023, 0.0, 6},
    {0.06, -0.605, 0.023, 0.046, 0.0, 6},
}};

}  // namespace

SignalRecord TrainingSet::record(std::size_t i) const {
  auto s = signal(i);
  return SignalRecord{schedule, std::vector<double>(s.begin(), s.end()), true, true};
}

TrainingSet TrainingSet::subset(std::span<const std::size_t> indices) const {
  TrainingSet out;
  out.schedule = schedule;
  out.prior_ranges = prior_ranges;
  out.signals.reserve(indices.size() * n_b());
  out.labels.reserve(indices.size());
  out.labels_normalized.reserve(indices.size());
  for (std::size_t i : indices) {
    auto s = signal(i);
    out.signals.insert(out.signals.end(), s.begin(), s.end());
    out.labels.push_back(labels[i]);
    out.labels_normalized.push_back(labels_normalized[i]);
  }
  return out;
}

TrainingSet sample_training_set(const CorpusOptions& opt) {
  if (opt.n == 0) throw InvalidArgument("training set size must be > 0");
  opt.ranges.validate();
  if (!opt.noiseless && !(opt.snr.min > 0.0 && opt.snr.min <= opt.snr.max))
    throw InvalidArgument("snr range must satisfy 0 < min <= max");

  const std::size_t nb = opt.schedule.size();
  TrainingSet set;
  set.schedule = opt.schedule;
  set.prior_ranges = opt.ranges;
  set.signals.resize(opt.n * nb);
  set.labels.resize(opt.n);
  set.labels_normalized.resize(opt.n);

  const std::size_t chunks = (opt.n + kCorpusChunk - 1) / kCorpusChunk;
  parallel_for(chunks, opt.workers, [&](std::size_t c) {
    Rng rng = make_rng(opt.seed, kStreamCorpus, c);
    std::uniform_real_distribution<double> snr_dist(opt.snr.min, opt.snr.max);
    const std::size_t end = std::min(opt.n, (c + 1) * kCorpusChunk);
    for (std::size_t i = c * kCorpusChunk; i < end; ++i) {
      const IvimParams p = draw_params(opt.ranges, rng);
      std::span<double> s(set.signals.data() + i * nb, nb);
      forward_signal_into(p, opt.schedule.values(), 1.0, s);
      if (!opt.noiseless) {
        const double snr = snr_dist(rng);
        rician_corrupt(s, 1.0 / snr, rng);
        if (!normalize_in_place(s)) throw NumericalFailure("noisy b=0 sample collapsed to zero");
      }
      set.labels[i] = p;
      set.labels_normalized[i] = opt.ranges.normalize(p);
    }
  });
  return set;
}

SplitIndices split_indices(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidArgument("split fraction must lie in (0, 1)");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return out;
}

std::pair<TrainingSet, TrainingSet> split_train_validation(const TrainingSet& set, double fraction,
                                                           std::uint64_t seed) {
  const SplitIndices idx = split_indices(set.size(), fraction, seed);
  return {set.subset(idx.train), set.subset(idx.validation)};
}

std::vector<std::uint8_t> shepp_logan_labels(int width, int height) {
  if (width <= 0 || height <= 0) throw InvalidArgument("phantom dimensions must be positive");
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(width) * height, 0);
  for (int row = 0; row < height; ++row) {
    const double y = 1.0 - 2.0 * (row + 0.5) / height;
    for (int col = 0; col < width; ++col) {
      const double x = 2.0 * (col + 0.5) / width - 1.0;
      std::uint8_t label = 0;
      for (const Ellipse& e : kEllipses) {
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double dx = x - e.x0;
        const double dy = y - e.y0;
        const double u = dx * std::cos(phi) + dy * std::sin(phi);
        const double v = -dx * std::sin(phi) + dy * std::cos(phi);
        if ((u * u) / (e.a * e.a) + (v * v) / (e.b * e.b) <= 1.0) label = e.label;
      }
      labels[static_cast<std::size_t>(row) * width + col] = label;
    }
  }
  return labels;
}

std::uint64_t phantom_seed(std::uint64_t master, std::size_t snr_index, std::size_t index) {
  return derive_seed(derive_seed(master, kStreamPhantomSet, snr_index), kStreamPhantomSet, index);
}

PhantomVolume generate_phantom(double snr, const PriorRanges& ranges, const BValueSchedule& schedule,
                               std::uint64_t seed, int width, int height) {
  if (!(snr > 0.0)) throw InvalidArgument("phantom snr must be > 0");
  ranges.validate();

  PhantomVolume ph;
  ph.width = width;
  ph.height = height;
  ph.schedule = schedule;
  ph.snr = snr;
  ph.roi_label = shepp_logan_labels(width, height);

  Rng roi_rng = make_rng(seed, kStreamPhantomRoi);
  std::array<IvimParams, kNumRois + 1> roi_truth{};
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  roi_truth[0] = {nan, nan, nan};
  for (int r = 1; r <= kNumRois; ++r) roi_truth[r] = draw_params(ranges, roi_rng);

  const std::size_t nb = schedule.size();
  const double sigma = 1.0 / snr;
  ph.truth.resize(ph.pixels());
  ph.signals.assign(ph.pixels() * nb, 0.0);
  Rng noise_rng = make_rng(seed, kStreamPhantomNoise);
  for (std::size_t px = 0; px < ph.pixels(); ++px) {
    const std::uint8_t label = ph.roi_label[px];
    ph.truth[px] = roi_truth[label];
    std::span<double> s(ph.signals.data() + px * nb, nb);
    if (label != 0) forward_signal_into(roi_truth[label], schedule.values(), 1.0, s);
    rician_corrupt(s, sigma, noise_rng);
  }
  return ph;
}

}  // namespace ivuq
