#pragma once

// Little-endian binary containers. Every container starts with an 8-byte
// magic (7 ASCII characters + NUL) and may end with an optional 24-byte
// provenance trailer: "IVUQPROV", u64 config hash, u64 master seed.
//
//   dataset    IVUQDS1  u32 n, u32 n_b, f32 b[n_b], f32 signal[n][n_b], f32 label[n][3]
//   phantom    IVUQPH1  u16 w, u16 h, u32 n_b, f32 snr, u8 label[w*h],
//                       f32 truth[w*h][3], f32 signal[w*h][n_b]
//   model      IVUQNN1  u32 version, u32 head, u32 n_layers, u32 size[n_layers], u32 K,
//                       u64 n_params, f64 params[n_params]
//   prediction IVUQPR1  u32 x, u32 y, u32 z, per voxel f32 map[3], f32 au[3], f32 eu[3]
//   samples    IVUQSM1  u32 n_voxels, u32 samples_per_voxel, per voxel f32 [3][samples_per_voxel]
//
// Parameter order is always (D, f, D*). Pixels are row-major, row 0 at the top.
// Skipped voxels carry NaN.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "ivuq/ensemble.hpp"
#include "ivuq/synthdata.hpp"

namespace ivuq {

inline constexpr std::uint32_t kModelFormatVersion = 1;

struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  bool operator==(const Provenance&) const = default;
};

void write_dataset(const std::filesystem::path& path, const TrainingSet& set,
                   const std::optional<Provenance>& prov = std::nullopt);
/// Normalized labels are recomputed from `ranges`.
TrainingSet read_dataset(const std::filesystem::path& path, const PriorRanges& ranges);

void write_phantom(const std::filesystem::path& path, const PhantomVolume& phantom,
                   const std::optional<Provenance>& prov = std::nullopt);
/// The phantom container does not carry b-values; the caller supplies the schedule.
PhantomVolume read_phantom(const std::filesystem::path& path, const BValueSchedule& schedule);

struct StoredModel {
  DenseNetwork net;
  HeadSpec spec;
};

void write_model(const std::filesystem::path& path, const DenseNetwork& net, const HeadSpec& spec,
                 const std::optional<Provenance>& prov = std::nullopt);
StoredModel read_model(const std::filesystem::path& path);

/// Text manifest listing member model files (relative to the manifest) plus
/// the shared head, prior ranges and b-value schedule.
void write_ensemble(const std::filesystem::path& manifest, const DeepEnsemble& ens,
                    const std::optional<Provenance>& prov = std::nullopt);
DeepEnsemble read_ensemble(const std::filesystem::path& manifest);

struct PredictionVolume {
  std::uint32_t x = 0, y = 0, z = 1;
  std::vector<IvimParams> map;
  std::vector<Triple> au;
  std::vector<Triple> eu;

  std::size_t voxels() const { return map.size(); }
};

void write_prediction(const std::filesystem::path& path, const PredictionVolume& pred,
                      const std::optional<Provenance>& prov = std::nullopt);
PredictionVolume read_prediction(const std::filesystem::path& path);

struct SampleDump {
  std::uint32_t samples_per_voxel = 0;
  std::vector<float> values;  // voxel-major, then parameter, then sample

  std::size_t voxels() const {
    return samples_per_voxel ? values.size() / (kNumParams * samples_per_voxel) : 0;
  }
  std::span<const float> of(std::size_t voxel, std::size_t param) const {
    return {values.data() + (voxel * kNumParams + param) * samples_per_voxel, samples_per_voxel};
  }
};

void write_samples(const std::filesystem::path& path, const SampleDump& dump,
                   const std::optional<Provenance>& prov = std::nullopt);
SampleDump read_samples(const std::filesystem::path& path);

/// Reads the provenance trailer of any container, if present.
std::optional<Provenance> read_provenance(const std::filesystem::path& path);

}  // namespace ivuq
