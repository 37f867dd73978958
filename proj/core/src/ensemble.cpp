#include "ivuq/ensemble.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ivuq/errors.hpp"
#include "ivuq/parallel.hpp"

namespace ivuq {

namespace {

constexpr std::uint64_t kStreamPredict = 0x70726564ULL;
constexpr std::size_t kPredictChunk = 1024;

}  // namespace

EnsembleTrainResult train_members(const TrainingSet& train_set, const TrainingSet* validation,
                                  const EnsembleTrainOptions& opt, const MemberEpochCallback& on_epoch) {
  opt.spec.validate();
  if (opt.members == 0) throw InvalidArgument("ensemble needs at least one member");
  const auto sizes = ivim_layer_sizes(train_set.n_b(), opt.spec.output_width(), opt.hidden);
  const BatchLoss loss = make_batch_loss(opt.spec);

  EnsembleTrainResult result;
  result.ensemble.spec = opt.spec;
  result.ensemble.ranges = train_set.prior_ranges;
  result.ensemble.schedule = train_set.schedule;
  result.ensemble.members.resize(opt.members);
  result.ensemble.seeds.resize(opt.members);
  result.histories.resize(opt.members);

  parallel_for(opt.members, opt.workers, [&](std::size_t m) {
    const std::uint64_t seed = opt.base_seed + m;
    TrainConfig cfg = opt.train;
    cfg.seed = seed;
    EpochCallback hook;
    if (on_epoch) hook = [&, m](std::size_t e, double tl, double vl) { on_epoch(m, e, tl, vl); };
    try {
      TrainResult tr = train(init_network(sizes, seed), loss, train_set, validation, cfg, hook);
      result.ensemble.members[m] = std::move(tr.net);
      result.histories[m] = std::move(tr.history);
      result.ensemble.seeds[m] = seed;
    } catch (const NumericalFailure& e) {
      throw NumericalFailure("ensemble member " + std::to_string(m) + ": " + e.what());
    }
  });
  return result;
}

EnsembleTrainResult train_ensemble(const TrainingSet& train_set, const TrainingSet* validation,
                                   const EnsembleTrainOptions& opt, const MemberEpochCallback& on_epoch) {
  if (opt.members < 2) throw InvalidArgument("a deep ensemble needs at least 2 members");
  return train_members(train_set, validation, opt, on_epoch);
}

Moments mixture_moments(const MixturePrediction& pred) {
  Moments out;
  for (std::size_t p = 0; p < kNumParams; ++p) {
    const Mixture1D& mix = pred[p];
    double mean = 0.0;
    for (std::size_t c = 0; c < mix.k(); ++c) mean += mix.weights[c] * mix.means[c];
    double var = 0.0;
    for (std::size_t c = 0; c < mix.k(); ++c) {
      const double d = mix.means[c] - mean;
      var += mix.weights[c] * (mix.stddevs[c] * mix.stddevs[c] + d * d);
    }
    out.mean[p] = mean;
    out.variance[p] = var;
  }
  return out;
}

MixturePrediction pool_mixtures(std::span<const MixturePrediction> members) {
  if (members.empty()) throw InvalidArgument("cannot pool an empty set of mixtures");
  const double w = 1.0 / static_cast<double>(members.size());
  MixturePrediction out;
  for (const MixturePrediction& m : members) {
    for (std::size_t p = 0; p < kNumParams; ++p) {
      const Mixture1D& src = m[p];
      Mixture1D& dst = out[p];
      for (std::size_t c = 0; c < src.k(); ++c) {
        dst.weights.push_back(w * src.weights[c]);
        dst.means.push_back(src.means[c]);
        dst.stddevs.push_back(src.stddevs[c]);
      }
    }
  }
  return out;
}

Decomposition decompose_uncertainty(std::span<const MixturePrediction> members) {
  if (members.size() < 2) throw UndefinedMetric("epistemic uncertainty needs at least 2 ensemble members");
  const double inv_m = 1.0 / static_cast<double>(members.size());
  std::vector<Moments> moments;
  moments.reserve(members.size());
  for (const auto& m : members) moments.push_back(mixture_moments(m));

  Decomposition out;
  for (std::size_t p = 0; p < kNumParams; ++p) {
    double mean_bar = 0.0, aleatoric = 0.0;
    for (const Moments& mo : moments) {
      mean_bar += mo.mean[p];
      aleatoric += mo.variance[p];
    }
    mean_bar *= inv_m;
    aleatoric *= inv_m;
    double epistemic = 0.0;
    for (const Moments& mo : moments) epistemic += (mo.mean[p] - mean_bar) * (mo.mean[p] - mean_bar);
    epistemic *= inv_m;
    out.au[p] = std::sqrt(aleatoric);
    out.eu[p] = std::sqrt(epistemic);
  }
  return out;
}

std::vector<MixturePrediction> member_predictions(const DeepEnsemble& ens, std::span<const double> x) {
  std::vector<MixturePrediction> out;
  out.reserve(ens.size());
  for (const DenseNetwork& net : ens.members) {
    const Vector raw = forward(net, x);
    out.push_back(decode_mixture({raw.data(), static_cast<std::size_t>(raw.size())}, ens.spec));
  }
  return out;
}

Decomposition decompose_uncertainty(const DeepEnsemble& ens, std::span<const double> x) {
  const auto preds = member_predictions(ens, x);
  return decompose_uncertainty(preds);
}

std::array<std::vector<double>, kNumParams> pooled_sample(std::span<const MixturePrediction> members,
                                                          std::size_t s_per_member, Rng& rng) {
  if (s_per_member == 0) throw InvalidArgument("samples per member must be >= 1");
  std::array<std::vector<double>, kNumParams> out;
  for (auto& v : out) v.reserve(members.size() * s_per_member);
  for (const MixturePrediction& m : members)
    for (std::size_t p = 0; p < kNumParams; ++p) sample_mixture(m[p], s_per_member, rng, out[p]);
  return out;
}

std::array<std::vector<double>, kNumParams> pooled_sample(const DeepEnsemble& ens, std::span<const double> x,
                                                          std::size_t s_per_member, Rng& rng) {
  const auto preds = member_predictions(ens, x);
  return pooled_sample(preds, s_per_member, rng);
}

EnsemblePrediction predict_voxel(const DeepEnsemble& ens, std::span<const double> x, std::size_t s_per_member,
                                 Rng& rng) {
  const auto preds = member_predictions(ens, x);
  EnsemblePrediction out;
  out.map_estimate = map_point_estimate(pool_mixtures(preds), ens.ranges);
  out.samples = pooled_sample(preds, s_per_member, rng);
  const Decomposition dec = decompose_uncertainty(preds);
  for (std::size_t p = 0; p < kNumParams; ++p) {
    out.au[p] = 100.0 * dec.au[p];
    out.eu[p] = 100.0 * dec.eu[p];
    out.total[p] = std::hypot(out.au[p], out.eu[p]);
  }
  return out;
}

BatchPrediction predict_batch(const DeepEnsemble& ens, const Eigen::Ref<const Matrix>& x,
                              const PredictOptions& opt) {
  if (ens.members.empty()) throw InvalidArgument("ensemble has no members");
  const auto n = static_cast<std::size_t>(x.cols());
  const bool mixture = ens.spec.probabilistic();
  const bool keep = mixture && opt.keep_samples;
  if (keep && opt.samples_per_member == 0) throw InvalidArgument("samples per member must be >= 1");
  if (mixture && ens.size() < 2) throw UndefinedMetric("epistemic uncertainty needs at least 2 ensemble members");

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  BatchPrediction out;
  out.map.resize(n);
  out.au.assign(n, Triple{nan, nan, nan});
  out.eu.assign(n, Triple{nan, nan, nan});
  out.samples_per_voxel = keep ? ens.size() * opt.samples_per_member : 0;
  out.samples.resize(n * kNumParams * out.samples_per_voxel);

  const std::size_t chunks = (n + kPredictChunk - 1) / kPredictChunk;
  parallel_for(chunks, opt.workers, [&](std::size_t chunk) {
    const std::size_t begin = chunk * kPredictChunk;
    const std::size_t count = std::min(n, begin + kPredictChunk) - begin;
    const auto cols = x.middleCols(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count));
    std::vector<Matrix> raw;
    raw.reserve(ens.size());
    for (const DenseNetwork& net : ens.members) raw.push_back(forward(net, cols));

    std::vector<MixturePrediction> preds(ens.size());
    for (std::size_t j = 0; j < count; ++j) {
      const std::size_t voxel = begin + j;
      const auto jj = static_cast<Eigen::Index>(j);
      if (!mixture) {
        Triple mean{};
        for (const Matrix& r : raw) {
          const Triple t = decode_point({r.col(jj).data(), kNumParams});
          for (std::size_t p = 0; p < kNumParams; ++p) mean[p] += t[p] / static_cast<double>(ens.size());
        }
        out.map[voxel] = ens.ranges.denormalize(mean);
        continue;
      }
      for (std::size_t m = 0; m < ens.size(); ++m)
        preds[m] = decode_mixture({raw[m].col(jj).data(), static_cast<std::size_t>(raw[m].rows())}, ens.spec);
      out.map[voxel] = map_point_estimate(pool_mixtures(preds), ens.ranges);
      const Decomposition dec = decompose_uncertainty(preds);
      for (std::size_t p = 0; p < kNumParams; ++p) {
        out.au[voxel][p] = 100.0 * dec.au[p];
        out.eu[voxel][p] = 100.0 * dec.eu[p];
      }
      if (keep) {
        Rng rng = make_rng(opt.seed, kStreamPredict, voxel);
        const auto pooled = pooled_sample(preds, opt.samples_per_member, rng);
        for (std::size_t p = 0; p < kNumParams; ++p) {
          double* dst = out.samples.data() + (voxel * kNumParams + p) * out.samples_per_voxel;
          for (std::size_t s = 0; s < out.samples_per_voxel; ++s) dst[s] = ens.ranges[p].denormalize(pooled[p][s]);
        }
      }
    }
  });
  return out;
}

}  // namespace ivuq
