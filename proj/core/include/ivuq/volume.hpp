#pragma once

// Raw float32 diffusion volumes with a plain-text sidecar:
//
//   data = scan.raw            float32 stack, path relative to the sidecar
//   dims = 76,76,8             x, y, z
//   bvalues = 0,15,...,1000    one volume per b-value
//   endianness = little        or big
//   mask = roi.raw             optional, u8 per voxel, nonzero = inside
//
// The stack is b-major: n_b consecutive volumes, each x-fastest then y then z.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ivuq/ivim_model.hpp"

namespace ivuq {

struct VolumeInput {
  std::uint32_t x = 0, y = 0, z = 1;
  BValueSchedule schedule = BValueSchedule::standard();
  std::vector<double> signals;   // voxel-major after loading: voxel * n_b + b
  std::vector<std::uint8_t> mask;  // empty when no mask was supplied

  std::size_t voxels() const { return std::size_t{x} * y * z; }
  std::size_t n_b() const { return schedule.size(); }
  std::span<const double> signal(std::size_t voxel) const { return {signals.data() + voxel * n_b(), n_b()}; }
  bool has_mask() const { return !mask.empty(); }
  bool in_mask(std::size_t voxel) const { return mask.empty() || mask[voxel] != 0; }
};

VolumeInput read_volume(const std::filesystem::path& sidecar);

/// Writes `data` (little-endian float32, b-major), an optional mask, and the sidecar.
void write_volume(const std::filesystem::path& sidecar, const VolumeInput& volume);

}  // namespace ivuq
