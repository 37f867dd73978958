#include "ivuq/volume.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "ivuq/errors.hpp"
#include "ivuq/keyvalue.hpp"

namespace ivuq {

namespace fs = std::filesystem;

namespace {

std::vector<char> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

VolumeInput read_volume(const fs::path& sidecar) {
  const KeyValueFile kv = KeyValueFile::load(sidecar);
  VolumeInput vol;
  const auto dims = kv.get_doubles("dims");
  if (dims.size() != 3 || std::any_of(dims.begin(), dims.end(), [](double d) { return !(d >= 1.0); }))
    throw InvalidArgument(sidecar.string() + ": dims must be 'x,y,z' with positive entries");
  vol.x = static_cast<std::uint32_t>(dims[0]);
  vol.y = static_cast<std::uint32_t>(dims[1]);
  vol.z = static_cast<std::uint32_t>(dims[2]);
  vol.schedule = BValueSchedule(kv.get_doubles("bvalues"));

  const std::string endian = kv.find("endianness").value_or("little");
  if (endian != "little" && endian != "big") throw InvalidArgument(sidecar.string() + ": endianness must be little or big");

  const fs::path base = sidecar.parent_path();
  const std::vector<char> raw = slurp(base / kv.get("data"));
  const std::size_t n = vol.voxels();
  const std::size_t nb = vol.n_b();
  if (raw.size() != n * nb * sizeof(float))
    throw FormatError(sidecar.string() + ": data holds " + std::to_string(raw.size()) + " bytes, dims x b-values need " +
                      std::to_string(n * nb * sizeof(float)));

  vol.signals.resize(n * nb);
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t v = 0; v < n; ++v) {
      char bytes[4];
      std::memcpy(bytes, raw.data() + (b * n + v) * 4, 4);
      if (endian == "big") std::reverse(bytes, bytes + 4);
      float f;
      std::memcpy(&f, bytes, 4);
      vol.signals[v * nb + b] = static_cast<double>(f);
    }
  }

  if (auto mask = kv.find("mask")) {
    const std::vector<char> m = slurp(base / *mask);
    if (m.size() != n)
      throw FormatError(sidecar.string() + ": mask holds " + std::to_string(m.size()) + " voxels, volume has " +
                        std::to_string(n));
    vol.mask.assign(m.begin(), m.end());
  }
  return vol;
}

void write_volume(const fs::path& sidecar, const VolumeInput& vol) {
  const fs::path base = sidecar.parent_path();
  if (!base.empty()) fs::create_directories(base);
  const std::string stem = sidecar.stem().string();
  const std::size_t n = vol.voxels();
  const std::size_t nb = vol.n_b();
  if (vol.signals.size() != n * nb) throw InvalidArgument("volume signal count does not match dims");

  std::vector<float> stack(n * nb);
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t v = 0; v < n; ++v) stack[b * n + v] = static_cast<float>(vol.signals[v * nb + b]);
  {
    std::ofstream out(base / (stem + ".raw"), std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write volume data next to " + sidecar.string());
    out.write(reinterpret_cast<const char*>(stack.data()), static_cast<std::streamsize>(stack.size() * sizeof(float)));
  }

  KeyValueFile kv;
  kv.set("data", stem + ".raw");
  kv.set("dims", std::to_string(vol.x) + "," + std::to_string(vol.y) + "," + std::to_string(vol.z));
  kv.set("bvalues", join_doubles(vol.schedule.values()));
  kv.set("endianness", "little");
  if (vol.has_mask()) {
    if (vol.mask.size() != n) throw InvalidArgument("mask size does not match dims");
    std::ofstream out(base / (stem + "_mask.raw"), std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(vol.mask.data()), static_cast<std::streamsize>(n));
    kv.set("mask", stem + "_mask.raw");
  }
  std::ofstream out(sidecar, std::ios::trunc);
  if (!out) throw IoError("cannot write " + sidecar.string());
  out << kv.to_string();
}

}  // namespace ivuq
