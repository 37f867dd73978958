#pragma once

// Supervised training corpus and Shepp-Logan evaluation phantoms.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ivuq/ivim_model.hpp"

namespace ivuq {

using Triple = std::array<double, kNumParams>;

/// Normalized signals (row-major, n x n_b) with physical and [0,1]-scaled labels.
struct TrainingSet {
  BValueSchedule schedule = BValueSchedule::standard();
  PriorRanges prior_ranges;
  std::vector<double> signals;
  std::vector<IvimParams> labels;
  std::vector<Triple> labels_normalized;

  std::size_t size() const { return labels.size(); }
  std::size_t n_b() const { return schedule.size(); }
  std::span<const double> signal(std::size_t i) const { return {signals.data() + i * n_b(), n_b()}; }
  SignalRecord record(std::size_t i) const;

  /// Copies the selected records, in the order given.
  TrainingSet subset(std::span<const std::size_t> indices) const;
};

struct SnrRange {
  double min = 1.0;
  double max = 200.0;
};

struct CorpusOptions {
  std::size_t n = 200000;
  PriorRanges ranges;
  BValueSchedule schedule = BValueSchedule::standard();
  SnrRange snr;
  std::uint64_t seed = 0;
  bool noiseless = false;
  unsigned workers = 1;
};

/// Draws n labels uniformly from the prior box, synthesizes each signal with
/// s0 = 1, corrupts it at a per-record uniform SNR and normalizes by the noisy
/// b=0 sample. Output depends only on the options' seed, not on `workers`.
TrainingSet sample_training_set(const CorpusOptions& options);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Random disjoint partition of [0, n): floor(fraction * n) indices to train, rest to validation.
SplitIndices split_indices(std::size_t n, double fraction, std::uint64_t seed);

std::pair<TrainingSet, TrainingSet> split_train_validation(const TrainingSet& set, double fraction,
                                                           std::uint64_t seed);

inline constexpr int kNumRois = 6;
inline constexpr int kPhantomSize = 76;

/// 2-D phantom with per-ROI ground truth and noisy, un-normalized pixel signals.
/// Background (label 0) pixels hold pure Rician noise and NaN truth.
struct PhantomVolume {
  int width = kPhantomSize;
  int height = kPhantomSize;
  BValueSchedule schedule = BValueSchedule::standard();
  double snr = 0.0;
  std::vector<std::uint8_t> roi_label;
  std::vector<IvimParams> truth;
  std::vector<double> signals;  // pixel-major: pixel * n_b + b

  std::size_t pixels() const { return roi_label.size(); }
  std::size_t n_b() const { return schedule.size(); }
  std::span<const double> signal(std::size_t pixel) const {
    return {signals.data() + pixel * n_b(), n_b()};
  }
  bool is_background(std::size_t pixel) const { return roi_label[pixel] == 0; }
};

/// Rasterizes the ten-ellipse Shepp-Logan head onto a width x height grid and
/// merges the ellipses into labels 1..6: outer shell, brain, right and left
/// lateral ellipses, upper lesion group, lower lesion group. Row 0 is the top.
std::vector<std::uint8_t> shepp_logan_labels(int width, int height);

/// Seed of phantom `index` at SNR level `snr_index` under a master seed.
std::uint64_t phantom_seed(std::uint64_t master, std::size_t snr_index, std::size_t index);

PhantomVolume generate_phantom(double snr, const PriorRanges& ranges, const BValueSchedule& schedule,
                               std::uint64_t seed, int width = kPhantomSize, int height = kPhantomSize);

}  // namespace ivuq
