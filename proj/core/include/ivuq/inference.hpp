#pragma once

// Voxel-wise inference over un-normalized signal stacks (phantoms or ingested
// volumes): normalization by the b=0 sample, ensemble or baseline prediction,
// and packing into prediction volumes.

#include <cstdint>
#include <optional>
#include <span>

#include "ivuq/baseline_fit.hpp"
#include "ivuq/ensemble.hpp"
#include "ivuq/io.hpp"

namespace ivuq {

/// Signals are voxel-major (voxel * n_b + b). `include` selects voxels
/// (nonzero = predict); empty means every voxel.
struct VoxelStack {
  std::uint32_t x = 0, y = 0, z = 1;
  const BValueSchedule* schedule = nullptr;
  std::span<const double> signals;
  std::span<const std::uint8_t> include;

  std::size_t voxels() const { return std::size_t{x} * y * z; }
};

struct InferenceResult {
  PredictionVolume volume;
  std::optional<SampleDump> samples;  // physical units; NaN for skipped voxels
  std::size_t predicted = 0;
  std::size_t skipped = 0;     // outside the include mask
  std::size_t degenerate = 0;  // non-positive or non-finite b=0 sample
};

/// Throws InvalidArgument listing both schedules when they differ.
void require_same_schedule(const BValueSchedule& model, const BValueSchedule& data);

InferenceResult predict_ensemble(const DeepEnsemble& ens, const VoxelStack& stack, const PredictOptions& options);

/// Segmented least-squares fit per voxel; AU/EU stay NaN.
InferenceResult predict_baseline(const VoxelStack& stack, const FitOptions& options, unsigned workers = 1);

}  // namespace ivuq
