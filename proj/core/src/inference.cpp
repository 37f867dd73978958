#include "ivuq/inference.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "ivuq/errors.hpp"
#include "ivuq/parallel.hpp"

namespace ivuq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_stack(const VoxelStack& s) {
  if (!s.schedule) throw InvalidArgument("voxel stack has no b-value schedule");
  if (s.signals.size() != s.voxels() * s.schedule->size())
    throw InvalidArgument("voxel stack holds " + std::to_string(s.signals.size()) + " samples, expected " +
                          std::to_string(s.voxels() * s.schedule->size()));
  if (!s.include.empty() && s.include.size() != s.voxels())
    throw InvalidArgument("mask size does not match the volume");
}

InferenceResult empty_result(const VoxelStack& s) {
  InferenceResult r;
  r.volume.x = s.x;
  r.volume.y = s.y;
  r.volume.z = s.z;
  r.volume.map.assign(s.voxels(), IvimParams{kNaN, kNaN, kNaN});
  r.volume.au.assign(s.voxels(), Triple{kNaN, kNaN, kNaN});
  r.volume.eu.assign(s.voxels(), Triple{kNaN, kNaN, kNaN});
  return r;
}

/// Normalized signals of the selected, non-degenerate voxels plus their indices.
std::vector<std::size_t> gather(const VoxelStack& s, InferenceResult& r, Matrix& x) {
  const std::size_t nb = s.schedule->size();
  std::vector<std::size_t> chosen;
  std::vector<double> buf(nb);
  x.resize(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(s.voxels()));
  for (std::size_t v = 0; v < s.voxels(); ++v) {
    if (!s.include.empty() && s.include[v] == 0) {
      ++r.skipped;
      continue;
    }
    std::copy_n(s.signals.begin() + static_cast<std::ptrdiff_t>(v * nb), nb, buf.begin());
    bool finite = true;
    for (double value : buf) finite = finite && std::isfinite(value);
    if (!finite || !normalize_in_place(buf)) {
      ++r.degenerate;
      continue;
    }
    std::copy(buf.begin(), buf.end(), x.col(static_cast<Eigen::Index>(chosen.size())).data());
    chosen.push_back(v);
  }
  x.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(chosen.size()));
  r.predicted = chosen.size();
  return chosen;
}

}  // namespace

void require_same_schedule(const BValueSchedule& model, const BValueSchedule& data) {
  if (model == data) return;
  throw InvalidArgument("b-value schedule mismatch: model expects [" + model.to_string() + "], input has [" +
                        data.to_string() + "]");
}

InferenceResult predict_ensemble(const DeepEnsemble& ens, const VoxelStack& stack, const PredictOptions& options) {
  check_stack(stack);
  require_same_schedule(ens.schedule, *stack.schedule);
  InferenceResult r = empty_result(stack);
  Matrix x;
  const auto chosen = gather(stack, r, x);
  if (chosen.empty()) return r;

  const BatchPrediction pred = predict_batch(ens, x, options);
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    r.volume.map[chosen[i]] = pred.map[i];
    r.volume.au[chosen[i]] = pred.au[i];
    r.volume.eu[chosen[i]] = pred.eu[i];
  }
  if (pred.samples_per_voxel > 0) {
    SampleDump dump;
    dump.samples_per_voxel = static_cast<std::uint32_t>(pred.samples_per_voxel);
    const std::size_t stride = kNumParams * pred.samples_per_voxel;
    dump.values.assign(stack.voxels() * stride, std::numeric_limits<float>::quiet_NaN());
    for (std::size_t i = 0; i < chosen.size(); ++i)
      for (std::size_t k = 0; k < stride; ++k)
        dump.values[chosen[i] * stride + k] = static_cast<float>(pred.samples[i * stride + k]);
    r.samples = std::move(dump);
  }
  return r;
}

InferenceResult predict_baseline(const VoxelStack& stack, const FitOptions& options, unsigned workers) {
  check_stack(stack);
  InferenceResult r = empty_result(stack);
  Matrix x;
  const auto chosen = gather(stack, r, x);
  const auto& b = stack.schedule->values();
  const std::size_t nb = b.size();
  parallel_for(chosen.size(), workers, [&](std::size_t i) {
    const FitResult fit = fit_segmented(b, std::span<const double>(x.col(static_cast<Eigen::Index>(i)).data(), nb), options);
    r.volume.map[chosen[i]] = fit.params;
  });
  return r;
}

}  // namespace ivuq
