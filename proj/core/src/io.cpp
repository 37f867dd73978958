#include "ivuq/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "ivuq/config.hpp"
#include "ivuq/errors.hpp"
#include "ivuq/keyvalue.hpp"

namespace ivuq {

static_assert(std::endian::native == std::endian::little, "binary containers assume a little-endian host");

namespace {

namespace fs = std::filesystem;

constexpr char kMagicDataset[8] = "IVUQDS1";
constexpr char kMagicPhantom[8] = "IVUQPH1";
constexpr char kMagicModel[8] = "IVUQNN1";
constexpr char kMagicPrediction[8] = "IVUQPR1";
constexpr char kMagicSamples[8] = "IVUQSM1";
constexpr char kMagicProvenance[8] = {'I', 'V', 'U', 'Q', 'P', 'R', 'O', 'V'};
constexpr std::size_t kTrailerSize = 24;

class Writer {
 public:
  explicit Writer(const char (&magic)[8]) { raw(magic, 8); }

  template <class T>
  void put(T v) {
    raw(&v, sizeof v);
  }
  void f32(double v) { put(static_cast<float>(v)); }
  void raw(const void* p, std::size_t n) {
    const auto* c = static_cast<const char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }

  void save(const fs::path& path, const std::optional<Provenance>& prov) {
    if (prov) {
      raw(kMagicProvenance, 8);
      put(prov->config_hash);
      put(prov->seed);
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw IoError("write failed: " + path.string());
  }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(const fs::path& path, const char (&magic)[8]) : path_(path.string()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path_);
    buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (buf_.size() < 8 || std::memcmp(buf_.data(), magic, 8) != 0)
      throw FormatError(path_ + ": not a " + std::string(magic) + " file");
    pos_ = 8;
  }

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof v);
    pos_ += sizeof v;
    return v;
  }
  double f32() { return static_cast<double>(get<float>()); }

  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw FormatError(path_ + ": truncated file");
  }

  /// Validates that only the payload (and optionally a trailer) remains.
  void expect_payload(std::size_t bytes) const {
    const std::size_t rest = buf_.size() - pos_;
    if (rest != bytes && rest != bytes + kTrailerSize) {
      std::ostringstream msg;
      msg << path_ << ": payload is " << rest << " bytes, header implies " << bytes;
      throw FormatError(msg.str());
    }
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument(std::string(what) + " exceeds u32 range");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void write_dataset(const fs::path& path, const TrainingSet& set, const std::optional<Provenance>& prov) {
  Writer w(kMagicDataset);
  w.put(checked_u32(set.size(), "record count"));
  w.put(checked_u32(set.n_b(), "b-value count"));
  for (double b : set.schedule.values()) w.f32(b);
  for (double s : set.signals) w.f32(s);
  for (const IvimParams& p : set.labels) {
    w.f32(p.d);
    w.f32(p.f);
    w.f32(p.d_star);
  }
  w.save(path, prov);
}

TrainingSet read_dataset(const fs::path& path, const PriorRanges& ranges) {
  Reader r(path, kMagicDataset);
  const auto n = r.get<std::uint32_t>();
  const auto nb = r.get<std::uint32_t>();
  if (nb == 0) throw FormatError(r.path() + ": zero b-values");
  r.need(4ull * nb);
  std::vector<double> b(nb);
  for (auto& v : b) v = r.f32();
  r.expect_payload(4ull * n * nb + 12ull * n);

  TrainingSet set;
  set.schedule = BValueSchedule(std::move(b));
  set.prior_ranges = ranges;
  set.signals.resize(std::size_t{n} * nb);
  for (auto& v : set.signals) v = r.f32();
  set.labels.resize(n);
  set.labels_normalized.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    set.labels[i].d = r.f32();
    set.labels[i].f = r.f32();
    set.labels[i].d_star = r.f32();
    set.labels_normalized[i] = ranges.normalize(set.labels[i]);
  }
  return set;
}

void write_phantom(const fs::path& path, const PhantomVolume& ph, const std::optional<Provenance>& prov) {
  if (ph.width > 0xffff || ph.height > 0xffff) throw InvalidArgument("phantom too large for u16 dimensions");
  Writer w(kMagicPhantom);
  w.put(static_cast<std::uint16_t>(ph.width));
  w.put(static_cast<std::uint16_t>(ph.height));
  w.put(checked_u32(ph.n_b(), "b-value count"));
  w.f32(ph.snr);
  w.raw(ph.roi_label.data(), ph.roi_label.size());
  for (const IvimParams& t : ph.truth) {
    w.f32(t.d);
    w.f32(t.f);
    w.f32(t.d_star);
  }
  for (double s : ph.signals) w.f32(s);
  w.save(path, prov);
}

PhantomVolume read_phantom(const fs::path& path, const BValueSchedule& schedule) {
  Reader r(path, kMagicPhantom);
  PhantomVolume ph;
  ph.width = r.get<std::uint16_t>();
  ph.height = r.get<std::uint16_t>();
  const auto nb = r.get<std::uint32_t>();
  ph.snr = r.f32();
  if (nb != schedule.size()) {
    std::ostringstream msg;
    msg << r.path() << ": phantom has " << nb << " b-values, schedule has " << schedule.size() << " ("
        << schedule.to_string() << ")";
    throw InvalidArgument(msg.str());
  }
  ph.schedule = schedule;
  const std::size_t px = static_cast<std::size_t>(ph.width) * ph.height;
  r.expect_payload(px + 12 * px + 4 * px * nb);
  ph.roi_label.resize(px);
  for (auto& l : ph.roi_label) l = r.get<std::uint8_t>();
  ph.truth.resize(px);
  for (auto& t : ph.truth) {
    t.d = r.f32();
    t.f = r.f32();
    t.d_star = r.f32();
  }
  ph.signals.resize(px * nb);
  for (auto& s : ph.signals) s = r.f32();
  return ph;
}

void write_model(const fs::path& path, const DenseNetwork& net, const HeadSpec& spec,
                 const std::optional<Provenance>& prov) {
  Writer w(kMagicModel);
  w.put(kModelFormatVersion);
  w.put(static_cast<std::uint32_t>(spec.kind));
  w.put(checked_u32(net.layer_sizes().size(), "layer count"));
  for (std::size_t s : net.layer_sizes()) w.put(checked_u32(s, "layer size"));
  w.put(checked_u32(spec.k, "component count"));
  w.put(static_cast<std::uint64_t>(net.params().size()));
  for (double p : net.params()) w.put(p);
  w.save(path, prov);
}

StoredModel read_model(const fs::path& path) {
  Reader r(path, kMagicModel);
  const auto version = r.get<std::uint32_t>();
  if (version != kModelFormatVersion)
    throw FormatError(r.path() + ": unsupported model version " + std::to_string(version));
  const auto tag = r.get<std::uint32_t>();
  if (tag > static_cast<std::uint32_t>(HeadKind::Mdn)) throw FormatError(r.path() + ": unknown head tag");
  const auto n_layers = r.get<std::uint32_t>();
  if (n_layers < 2 || n_layers > 64) throw FormatError(r.path() + ": implausible layer count");
  std::vector<std::size_t> sizes(n_layers);
  for (auto& s : sizes) s = r.get<std::uint32_t>();
  HeadSpec spec{static_cast<HeadKind>(tag), r.get<std::uint32_t>()};
  spec.validate();
  const auto n_params = r.get<std::uint64_t>();
  r.expect_payload(8 * n_params);
  std::vector<double> params(n_params);
  for (auto& p : params) p = r.get<double>();
  DenseNetwork net(std::move(sizes), std::move(params));
  if (net.output_size() != spec.output_width()) throw FormatError(r.path() + ": output width does not match head");
  return {std::move(net), spec};
}

void write_ensemble(const fs::path& manifest, const DeepEnsemble& ens, const std::optional<Provenance>& prov) {
  const fs::path dir = manifest.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  KeyValueFile kv;
  kv.set("head", to_string(ens.spec.kind));
  kv.set("k", std::to_string(ens.spec.k));
  kv.set("members", std::to_string(ens.size()));
  kv.set("bvalues", join_doubles(ens.schedule.values()));
  kv.set("d_range", join_doubles({ens.ranges[0].min, ens.ranges[0].max}));
  kv.set("f_range", join_doubles({ens.ranges[1].min, ens.ranges[1].max}));
  kv.set("dstar_range", join_doubles({ens.ranges[2].min, ens.ranges[2].max}));
  for (std::size_t m = 0; m < ens.size(); ++m) {
    const std::string name = "member_" + std::to_string(m) + ".ivuqnn";
    write_model(dir / name, ens.members[m], ens.spec, prov);
    kv.add("member", name);
    kv.add("member_seed", std::to_string(ens.seeds.empty() ? 0 : ens.seeds[m]));
  }
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw IoError("cannot write " + manifest.string());
  out << "# ivuq ensemble manifest\n";
  if (prov) out << "# config_hash=" << hex64(prov->config_hash) << " seed=" << prov->seed << "\n";
  out << kv.to_string();
}

DeepEnsemble read_ensemble(const fs::path& manifest) {
  const KeyValueFile kv = KeyValueFile::load(manifest);
  DeepEnsemble ens;
  ens.spec = {parse_head_kind(kv.get("head")), static_cast<std::size_t>(kv.get_int("k"))};
  ens.spec.validate();
  ens.schedule = BValueSchedule(kv.get_doubles("bvalues"));
  const char* keys[] = {"d_range", "f_range", "dstar_range"};
  for (std::size_t p = 0; p < kNumParams; ++p) {
    const auto r = kv.get_doubles(keys[p]);
    if (r.size() != 2) throw FormatError(manifest.string() + ": " + keys[p] + " must be 'min,max'");
    ens.ranges[p] = {r[0], r[1]};
  }
  ens.ranges.validate();
  const auto& files = kv.all("member");
  const auto& seeds = kv.all("member_seed");
  if (files.empty()) throw FormatError(manifest.string() + ": manifest lists no members");
  for (std::size_t m = 0; m < files.size(); ++m) {
    StoredModel sm = read_model(manifest.parent_path() / files[m]);
    if (!(sm.spec == ens.spec)) throw FormatError(files[m] + ": head does not match manifest");
    if (sm.net.input_size() != ens.schedule.size())
      throw FormatError(files[m] + ": input size does not match manifest b-values");
    ens.members.push_back(std::move(sm.net));
    ens.seeds.push_back(m < seeds.size() ? std::stoull(seeds[m]) : 0);
  }
  return ens;
}

void write_prediction(const fs::path& path, const PredictionVolume& pred, const std::optional<Provenance>& prov) {
  const std::size_t n = std::size_t{pred.x} * pred.y * pred.z;
  if (pred.map.size() != n || pred.au.size() != n || pred.eu.size() != n)
    throw InvalidArgument("prediction arrays do not match volume dimensions");
  Writer w(kMagicPrediction);
  w.put(pred.x);
  w.put(pred.y);
  w.put(pred.z);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < kNumParams; ++p) w.f32(pred.map[i][p]);
    for (std::size_t p = 0; p < kNumParams; ++p) w.f32(pred.au[i][p]);
    for (std::size_t p = 0; p < kNumParams; ++p) w.f32(pred.eu[i][p]);
  }
  w.save(path, prov);
}

PredictionVolume read_prediction(const fs::path& path) {
  Reader r(path, kMagicPrediction);
  PredictionVolume pred;
  pred.x = r.get<std::uint32_t>();
  pred.y = r.get<std::uint32_t>();
  pred.z = r.get<std::uint32_t>();
  const std::size_t n = std::size_t{pred.x} * pred.y * pred.z;
  r.expect_payload(36 * n);
  pred.map.resize(n);
  pred.au.resize(n);
  pred.eu.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < kNumParams; ++p) pred.map[i][p] = r.f32();
    for (std::size_t p = 0; p < kNumParams; ++p) pred.au[i][p] = r.f32();
    for (std::size_t p = 0; p < kNumParams; ++p) pred.eu[i][p] = r.f32();
  }
  return pred;
}

void write_samples(const fs::path& path, const SampleDump& dump, const std::optional<Provenance>& prov) {
  Writer w(kMagicSamples);
  w.put(checked_u32(dump.voxels(), "voxel count"));
  w.put(dump.samples_per_voxel);
  w.raw(dump.values.data(), dump.values.size() * sizeof(float));
  w.save(path, prov);
}

SampleDump read_samples(const fs::path& path) {
  Reader r(path, kMagicSamples);
  const auto n = r.get<std::uint32_t>();
  SampleDump dump;
  dump.samples_per_voxel = r.get<std::uint32_t>();
  const std::size_t count = std::size_t{n} * kNumParams * dump.samples_per_voxel;
  r.expect_payload(4 * count);
  dump.values.resize(count);
  for (auto& v : dump.values) v = r.get<float>();
  return dump;
}

std::optional<Provenance> read_provenance(const fs::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open " + path.string());
  const auto size = static_cast<std::size_t>(in.tellg());
  if (size < 8 + kTrailerSize) return std::nullopt;
  char t[kTrailerSize];
  in.seekg(static_cast<std::streamoff>(size - kTrailerSize));
  in.read(t, kTrailerSize);
  if (std::memcmp(t, kMagicProvenance, 8) != 0) return std::nullopt;
  Provenance p;
  std::memcpy(&p.config_hash, t + 8, 8);
  std::memcpy(&p.seed, t + 16, 8);
  return p;
}

}  // namespace ivuq
