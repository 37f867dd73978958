#pragma once

// Deep ensembles of identically shaped heads: training, uniform pooling,
// sampling, and the aleatoric/epistemic split from closed-form mixture moments.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ivuq/neuralnet.hpp"
#include "ivuq/prob_heads.hpp"

namespace ivuq {

struct DeepEnsemble {
  HeadSpec spec;
  PriorRanges ranges;
  BValueSchedule schedule = BValueSchedule::standard();
  std::vector<DenseNetwork> members;
  std::vector<std::uint64_t> seeds;

  std::size_t size() const { return members.size(); }
};

struct EnsembleTrainOptions {
  HeadSpec spec;
  TrainConfig train;  // train.seed is overwritten per member
  std::size_t members = 5;
  std::uint64_t base_seed = 0;
  std::size_t hidden = kDefaultHidden;
  unsigned workers = 1;
};

struct EnsembleTrainResult {
  DeepEnsemble ensemble;
  std::vector<LossHistory> histories;
};

/// Per-member epoch hook: (member, epoch, train loss, validation loss).
using MemberEpochCallback = std::function<void(std::size_t, std::size_t, double, double)>;

/// Trains members with seeds base_seed + m (initialization and shuffling both
/// derive from it). Members may run concurrently; results do not depend on
/// scheduling. Requires members >= 2.
EnsembleTrainResult train_ensemble(const TrainingSet& train, const TrainingSet* validation,
                                   const EnsembleTrainOptions& options, const MemberEpochCallback& on_epoch = {});

/// Same as train_ensemble but without the M >= 2 guard; used for K sweeps and tests.
EnsembleTrainResult train_members(const TrainingSet& train, const TrainingSet* validation,
                                  const EnsembleTrainOptions& options, const MemberEpochCallback& on_epoch = {});

struct Moments {
  Triple mean{};
  Triple variance{};
};

/// mean = sum pi_k mu_k; variance = sum pi_k (sigma_k^2 + (mu_k - mean)^2), per parameter.
Moments mixture_moments(const MixturePrediction& pred);

/// Uniform-weight mixture of the member mixtures (M*K components).
MixturePrediction pool_mixtures(std::span<const MixturePrediction> members);

/// Standard deviations in normalized units (fraction of the prior range width).
struct Decomposition {
  Triple au{};
  Triple eu{};
};

/// AU = sqrt(mean_m var_m), EU = sqrt(mean_m (mean_m - mean_bar)^2). Throws
/// UndefinedMetric for fewer than two members.
Decomposition decompose_uncertainty(std::span<const MixturePrediction> members);

std::vector<MixturePrediction> member_predictions(const DeepEnsemble& ens, std::span<const double> x);
Decomposition decompose_uncertainty(const DeepEnsemble& ens, std::span<const double> x);

/// s_per_member draws from every member, pooled without weighting: per
/// parameter M * s_per_member normalized samples, member-major.
std::array<std::vector<double>, kNumParams> pooled_sample(std::span<const MixturePrediction> members,
                                                          std::size_t s_per_member, Rng& rng);
std::array<std::vector<double>, kNumParams> pooled_sample(const DeepEnsemble& ens, std::span<const double> x,
                                                          std::size_t s_per_member, Rng& rng);

/// Single-voxel summary. AU/EU/total are percent of the prior range width.
struct EnsemblePrediction {
  IvimParams map_estimate;
  std::array<std::vector<double>, kNumParams> samples;  // normalized
  Triple au{};
  Triple eu{};
  Triple total{};
};

EnsemblePrediction predict_voxel(const DeepEnsemble& ens, std::span<const double> x, std::size_t s_per_member,
                                 Rng& rng);

struct PredictOptions {
  std::size_t samples_per_member = 100;
  std::uint64_t seed = 0;
  bool keep_samples = false;
  unsigned workers = 1;
};

/// Physical-unit predictions for a batch of normalized signals. AU/EU are
/// percent of the prior range width and NaN for point heads. When samples are
/// kept they are denormalized, laid out voxel-major then parameter-major.
struct BatchPrediction {
  std::vector<IvimParams> map;
  std::vector<Triple> au;
  std::vector<Triple> eu;
  std::size_t samples_per_voxel = 0;
  std::vector<double> samples;

  std::size_t size() const { return map.size(); }
  std::span<const double> samples_of(std::size_t voxel, std::size_t param) const {
    return {samples.data() + (voxel * kNumParams + param) * samples_per_voxel, samples_per_voxel};
  }
};

/// `x` holds one normalized signal per column. The sampling generator of
/// column j is derived from (options.seed, j), so output is independent of
/// the worker count.
BatchPrediction predict_batch(const DeepEnsemble& ens, const Eigen::Ref<const Matrix>& x,
                              const PredictOptions& options);

}  // namespace ivuq
