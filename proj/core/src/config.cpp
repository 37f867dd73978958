#include "ivuq/config.hpp"

#include <cstdio>
#include <sstream>

#include "ivuq/errors.hpp"

namespace ivuq {

namespace {

std::string fmt(double v) { return format_double(v); }

std::string range_text(const Range& r) { return fmt(r.min) + "," + fmt(r.max); }

Range parse_range(const KeyValueFile& kv, const std::string& key) {
  const auto v = kv.get_doubles(key);
  if (v.size() != 2) throw InvalidArgument(key + " must be 'min,max'");
  return {v[0], v[1]};
}

template <class T>
T non_negative(long long v, const std::string& key) {
  if (v < 0) throw InvalidArgument(key + " must be non-negative");
  return static_cast<T>(v);
}

}  // namespace

void ExperimentConfig::validate() const {
  ranges.validate();
  head.validate();
  train.validate();
  if (n_train == 0) throw InvalidArgument("data.n_train must be > 0");
  if (!(snr.min > 0.0 && snr.min <= snr.max)) throw InvalidArgument("data.snr must satisfy 0 < min <= max");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InvalidArgument("data.train_fraction must lie in (0, 1)");
  for (double s : phantom_snrs)
    if (!(s > 0.0)) throw InvalidArgument("data.phantom_snrs entries must be > 0");
  if (members == 0) throw InvalidArgument("model.members must be >= 1");
  if (samples_per_member == 0) throw InvalidArgument("model.samples_per_member must be >= 1");
  if (hidden == 0) throw InvalidArgument("model.hidden must be >= 1");
}

KeyValueFile ExperimentConfig::to_keyvalue() const {
  KeyValueFile kv;
  kv.set("data.bvalues", join_doubles(schedule.values()));
  kv.set("data.d_range", range_text(ranges[0]));
  kv.set("data.f_range", range_text(ranges[1]));
  kv.set("data.dstar_range", range_text(ranges[2]));
  kv.set("data.n_train", std::to_string(n_train));
  kv.set("data.snr", fmt(snr.min) + "," + fmt(snr.max));
  kv.set("data.train_fraction", fmt(train_fraction));
  kv.set("data.phantom_snrs", join_doubles(phantom_snrs));
  kv.set("data.phantoms_per_snr", std::to_string(phantoms_per_snr));
  kv.set("model.head", to_string(head.kind));
  kv.set("model.k", std::to_string(head.k));
  kv.set("model.members", std::to_string(members));
  kv.set("model.samples_per_member", std::to_string(samples_per_member));
  kv.set("model.hidden", std::to_string(hidden));
  kv.set("train.learning_rate", fmt(train.learning_rate));
  kv.set("train.batch_size", std::to_string(train.batch_size));
  kv.set("train.epochs", std::to_string(train.epochs));
  kv.set("train.beta1", fmt(train.beta1));
  kv.set("train.beta2", fmt(train.beta2));
  kv.set("train.epsilon", fmt(train.epsilon));
  kv.set("run.seed", std::to_string(seed));
  return kv;
}

ExperimentConfig ExperimentConfig::from_keyvalue(const KeyValueFile& kv) {
  ExperimentConfig c;
  for (const auto& key : kv.keys()) {
    if (key == "data.bvalues") c.schedule = BValueSchedule(kv.get_doubles(key));
    else if (key == "data.d_range") c.ranges[0] = parse_range(kv, key);
    else if (key == "data.f_range") c.ranges[1] = parse_range(kv, key);
    else if (key == "data.dstar_range") c.ranges[2] = parse_range(kv, key);
    else if (key == "data.n_train") c.n_train = non_negative<std::size_t>(kv.get_int(key), key);
    else if (key == "data.snr") {
      const Range r = parse_range(kv, key);
      c.snr = {r.min, r.max};
    } else if (key == "data.train_fraction") c.train_fraction = kv.get_double(key);
    else if (key == "data.phantom_snrs") c.phantom_snrs = kv.get_doubles(key);
    else if (key == "data.phantoms_per_snr") c.phantoms_per_snr = non_negative<std::size_t>(kv.get_int(key), key);
    else if (key == "model.head") c.head.kind = parse_head_kind(kv.get(key));
    else if (key == "model.k") c.head.k = non_negative<std::size_t>(kv.get_int(key), key);
    else if (key == "model.members") c.members = non_negative<std::size_t>(kv.get_int(key), key);
    else if (key == "model.samples_per_member") c.samples_per_member = non_negative<std::size_t>(kv.get_int(key), key);
    else if (key == "model.hidden") c.hidden = non_negative<std::size_t>(kv.get_int(key), key);
    else if (key == "train.learning_rate") c.train.learning_rate = kv.get_double(key);
    else if (key == "train.batch_size") c.train.batch_size = non_negative<std::size_t>(kv.get_int(key), key);
    else if (key == "train.epochs") c.train.epochs = non_negative<std::size_t>(kv.get_int(key), key);
    else if (key == "train.beta1") c.train.beta1 = kv.get_double(key);
    else if (key == "train.beta2") c.train.beta2 = kv.get_double(key);
    else if (key == "train.epsilon") c.train.epsilon = kv.get_double(key);
    else if (key == "run.seed") c.seed = static_cast<std::uint64_t>(non_negative<std::uint64_t>(kv.get_int(key), key));
    else if (key == "run.workers") c.workers = non_negative<unsigned>(kv.get_int(key), key);
    else throw InvalidArgument("unknown configuration key '" + key + "'");
  }
  if (c.head.kind != HeadKind::Mdn && !kv.has("model.k")) c.head.k = 1;
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  return from_keyvalue(KeyValueFile::load(path));
}

std::uint64_t ExperimentConfig::hash() const {
  KeyValueFile kv = to_keyvalue();
  kv.set("run.seed", "-");
  return fnv1a64(kv.to_string());
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace ivuq
