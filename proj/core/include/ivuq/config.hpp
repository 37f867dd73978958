#pragma once

// Experiment configuration shared by every CLI subcommand.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ivuq/ivim_model.hpp"
#include "ivuq/keyvalue.hpp"
#include "ivuq/neuralnet.hpp"
#include "ivuq/prob_heads.hpp"
#include "ivuq/synthdata.hpp"

namespace ivuq {

struct ExperimentConfig {
  // [data]
  BValueSchedule schedule = BValueSchedule::standard();
  PriorRanges ranges;
  std::size_t n_train = 200000;
  SnrRange snr{1.0, 200.0};
  double train_fraction = 0.8;
  std::vector<double> phantom_snrs{25.0, 50.0, 100.0};
  std::size_t phantoms_per_snr = 200;

  // [model]
  HeadSpec head = HeadSpec::mdn(10);
  std::size_t members = 5;
  std::size_t samples_per_member = 100;
  std::size_t hidden = kDefaultHidden;

  // [train]
  TrainConfig train;  // train.seed unused; member seeds derive from `seed`

  // [run]
  std::uint64_t seed = 42;
  unsigned workers = 1;

  void validate() const;

  /// Canonical text of every field that influences outputs (workers excluded).
  KeyValueFile to_keyvalue() const;
  static ExperimentConfig from_keyvalue(const KeyValueFile& kv);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// FNV-1a 64 over the canonical text with the seed removed.
  std::uint64_t hash() const;
};

std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

}  // namespace ivuq
