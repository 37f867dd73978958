#include "ivuq_tools/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include "ivuq/errors.hpp"
#include "ivuq/evaluation.hpp"
#include "ivuq/inference.hpp"
#include "ivuq/keyvalue.hpp"
#include "ivuq/parallel.hpp"
#include "ivuq/rng.hpp"
#include "ivuq/volume.hpp"

namespace ivuq::cli {

namespace {

constexpr std::uint64_t kStreamCorpus = 0x73696d;
constexpr std::uint64_t kStreamSplit = 0x73706c6974;
constexpr std::uint64_t kStreamPredict = 0x70726564;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void write_config(const fs::path& dir, const ExperimentConfig& cfg) {
  write_text(dir / kConfigFile, "# " + provenance_line(cfg) + "\n" + cfg.to_keyvalue().to_string());
}

std::string snr_tag(double snr) {
  std::ostringstream out;
  if (snr == std::floor(snr)) {
    out << static_cast<long long>(snr);
  } else {
    out << snr;
  }
  std::string s = out.str();
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

std::string phantom_stem(double snr, std::size_t index) {
  std::ostringstream out;
  out << "snr" << snr_tag(snr) << '_' << std::setw(3) << std::setfill('0') << index;
  return out.str();
}

/// Comma-separated text with `#` comment lines and a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string comment;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw FormatError("csv column '" + name + "' not found");
    return static_cast<std::size_t>(it - header.begin());
  }
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (t.comment.empty()) t.comment = line.substr(line.find_first_not_of("# "));
      continue;
    }
    auto cells = split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
    } else {
      if (cells.size() != t.header.size())
        throw FormatError(path.string() + ": row has " + std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(t.header.size()));
      t.rows.push_back(std::move(cells));
    }
  }
  if (t.header.empty()) throw FormatError(path.string() + ": missing header row");
  return t;
}

struct PhantomEntry {
  std::string stem;
  double snr = 0.0;
  std::size_t snr_index = 0;
  std::size_t index = 0;
};

std::vector<PhantomEntry> read_phantom_manifest(const fs::path& dir) {
  const CsvTable t = read_csv(dir / kPhantomManifest);
  const std::size_t cf = t.column("file"), cs = t.column("snr"), ci = t.column("snr_index"), cn = t.column("index");
  std::vector<PhantomEntry> out;
  for (const auto& r : t.rows)
    out.push_back({fs::path(r[cf]).stem().string(), std::stod(r[cs]), std::stoul(r[ci]), std::stoul(r[cn])});
  if (out.empty()) throw FormatError((dir / kPhantomManifest).string() + " lists no phantoms");
  return out;
}

/// Parent of a phantoms/ directory holds the simulate config.
fs::path phantom_config_dir(const fs::path& phantoms) {
  const fs::path parent = fs::absolute(phantoms).lexically_normal().parent_path();
  if (fs::exists(phantoms / kConfigFile)) return phantoms;
  return parent;
}

void require_dir(const fs::path& dir, const std::string& what) {
  if (!fs::is_directory(dir)) throw IoError(what + " directory not found: " + dir.string());
}

HeadSpec apply_head_overrides(HeadSpec spec, const std::optional<std::string>& head, const std::optional<std::size_t>& k) {
  if (head) {
    spec.kind = parse_head_kind(*head);
    if (spec.kind != HeadKind::Mdn) spec.k = 1;
  }
  if (k) spec.k = *k;
  spec.validate();
  return spec;
}

void write_losses(const fs::path& path, const LossHistory& h, const std::string& prov) {
  std::ostringstream out;
  out.precision(12);
  out << "# " << prov << "\nepoch,train_loss,validation_loss\n";
  for (std::size_t e = 0; e < h.train.size(); ++e) out << e + 1 << ',' << h.train[e] << ',' << h.validation[e] << '\n';
  write_text(path, out.str());
}

std::pair<TrainingSet, TrainingSet> load_split(const fs::path& data, const ExperimentConfig& cfg) {
  TrainingSet all = read_dataset(data / kDatasetFile, cfg.ranges);
  if (!(all.schedule == cfg.schedule))
    throw InvalidArgument("dataset b-values [" + all.schedule.to_string() + "] differ from config [" +
                          cfg.schedule.to_string() + "]");
  const KeyValueFile split = KeyValueFile::load(data / kSplitFile);
  const double fraction = split.get_double("train_fraction");
  const auto seed = static_cast<std::uint64_t>(std::stoull(split.get("split_seed")));
  const SplitIndices idx = split_indices(all.size(), fraction, seed);
  if (idx.validation.size() != static_cast<std::size_t>(split.get_int("n_validation")))
    throw FormatError((data / kSplitFile).string() + " does not match the dataset size");
  return {all.subset(idx.train), all.subset(idx.validation)};
}

EnsembleTrainResult train_logged(const TrainingSet& tr, const TrainingSet& va, const EnsembleTrainOptions& o,
                                 std::ostream& log, const std::string& label, bool allow_single) {
  std::mutex mu;
  const std::size_t every = std::max<std::size_t>(1, o.train.epochs / 10);
  const auto cb = [&](std::size_t m, std::size_t epoch, double train_loss, double val_loss) {
    if ((epoch + 1) % every != 0 && epoch + 1 != o.train.epochs) return;
    std::lock_guard lock(mu);
    log << label << " member " << m << " epoch " << epoch + 1 << "/" << o.train.epochs << " train " << train_loss
        << " validation " << val_loss << '\n';
  };
  return allow_single ? train_members(tr, &va, o, cb) : train_ensemble(tr, &va, o, cb);
}

void write_ensemble_dir(const fs::path& dir, const EnsembleTrainResult& r, const ExperimentConfig& cfg) {
  fs::create_directories(dir);
  write_ensemble(dir / kEnsembleManifest, r.ensemble, provenance_of(cfg));
  for (std::size_t m = 0; m < r.histories.size(); ++m)
    write_losses(dir / ("loss_member_" + std::to_string(m) + ".csv"), r.histories[m], provenance_line(cfg));
  write_config(dir, cfg);
}

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "n/a";
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

std::string sci(double v) {
  if (std::isnan(v)) return "n/a";
  std::ostringstream out;
  out << std::setprecision(3) << v;
  return out.str();
}

}  // namespace

ExperimentConfig resolve_config(const CommonOptions& common, const fs::path& fallback_dir) {
  ExperimentConfig cfg;
  if (!common.config.empty()) {
    cfg = ExperimentConfig::load(common.config);
  } else if (!fallback_dir.empty() && fs::exists(fallback_dir / kConfigFile)) {
    cfg = ExperimentConfig::load(fallback_dir / kConfigFile);
  }
  if (common.seed) cfg.seed = *common.seed;
  if (common.workers) cfg.workers = *common.workers;
  cfg.validate();
  return cfg;
}

Provenance provenance_of(const ExperimentConfig& cfg) { return {cfg.hash(), cfg.seed}; }

std::string provenance_line(const ExperimentConfig& cfg) {
  return "ivuq config_hash=" + hex64(cfg.hash()) + " seed=" + std::to_string(cfg.seed);
}

void cmd_simulate(const SimulateOptions& opt, std::ostream& log) {
  ExperimentConfig cfg = resolve_config(opt.common);
  if (opt.n) cfg.n_train = *opt.n;
  if (opt.phantoms) cfg.phantoms_per_snr = *opt.phantoms;
  cfg.validate();
  const fs::path out = opt.common.out;
  const Provenance prov = provenance_of(cfg);
  fs::create_directories(out / kPhantomDir);
  write_config(out, cfg);

  CorpusOptions corpus;
  corpus.n = cfg.n_train;
  corpus.ranges = cfg.ranges;
  corpus.schedule = cfg.schedule;
  corpus.snr = cfg.snr;
  corpus.seed = derive_seed(cfg.seed, kStreamCorpus);
  corpus.workers = cfg.workers;
  const TrainingSet set = sample_training_set(corpus);
  write_dataset(out / kDatasetFile, set, prov);

  const std::uint64_t split_seed = derive_seed(cfg.seed, kStreamSplit);
  const SplitIndices split = split_indices(set.size(), cfg.train_fraction, split_seed);
  std::ostringstream st;
  st << "# " << provenance_line(cfg) << "\n"
     << "train_fraction = " << cfg.train_fraction << "\n"
     << "split_seed = " << split_seed << "\n"
     << "n_train = " << split.train.size() << "\n"
     << "n_validation = " << split.validation.size() << "\n"
     << "validation = ";
  for (std::size_t i = 0; i < split.validation.size(); ++i) st << (i ? "," : "") << split.validation[i];
  st << "\n";
  write_text(out / kSplitFile, st.str());
  log << "wrote " << set.size() << " training records (" << split.train.size() << " train / "
      << split.validation.size() << " validation)\n";

  std::vector<PhantomEntry> entries;
  for (std::size_t s = 0; s < cfg.phantom_snrs.size(); ++s)
    for (std::size_t i = 0; i < cfg.phantoms_per_snr; ++i)
      entries.push_back({phantom_stem(cfg.phantom_snrs[s], i), cfg.phantom_snrs[s], s, i});
  parallel_for(entries.size(), cfg.workers, [&](std::size_t j) {
    const PhantomEntry& e = entries[j];
    const PhantomVolume ph =
        generate_phantom(e.snr, cfg.ranges, cfg.schedule, phantom_seed(cfg.seed, e.snr_index, e.index));
    write_phantom(out / kPhantomDir / (e.stem + ".ivuqph"), ph, prov);
  });
  std::ostringstream manifest;
  manifest << "# " << provenance_line(cfg) << "\nfile,snr,snr_index,index,seed\n";
  for (const auto& e : entries)
    manifest << e.stem << ".ivuqph," << e.snr << ',' << e.snr_index << ',' << e.index << ','
             << phantom_seed(cfg.seed, e.snr_index, e.index) << '\n';
  write_text(out / kPhantomDir / kPhantomManifest, manifest.str());
  log << "wrote " << entries.size() << " phantoms to " << (out / kPhantomDir).string() << '\n';
}

void cmd_train(const TrainOptions& opt, std::ostream& log) {
  require_dir(opt.data, "data");
  ExperimentConfig cfg = resolve_config(opt.common, opt.data);
  cfg.head = apply_head_overrides(cfg.head, opt.head, opt.k);
  if (opt.members) cfg.members = *opt.members;
  if (opt.epochs) cfg.train.epochs = *opt.epochs;
  cfg.validate();
  const auto [tr, va] = load_split(opt.data, cfg);
  log << "training on " << tr.size() << " records, validating on " << va.size() << '\n';

  EnsembleTrainOptions o;
  o.spec = cfg.head;
  o.train = cfg.train;
  o.members = cfg.members;
  o.base_seed = cfg.seed;
  o.hidden = cfg.hidden;
  o.workers = cfg.workers;
  const fs::path out = opt.common.out;

  if (!opt.k_sweep) {
    const auto r = train_logged(tr, va, o, log, to_string(o.spec.kind), false);
    write_ensemble_dir(out, r, cfg);
    log << "wrote ensemble of " << r.ensemble.size() << " members to " << (out / kEnsembleManifest).string() << '\n';
    return;
  }

  std::ostringstream csv;
  csv.precision(12);
  csv << "# " << provenance_line(cfg) << "\nk,mean_validation_loss,sd_validation_loss,members\n";
  for (std::size_t k : opt.sweep_ks) {
    ExperimentConfig kcfg = cfg;
    kcfg.head = HeadSpec::mdn(k);
    kcfg.validate();
    o.spec = kcfg.head;
    const auto r = train_logged(tr, va, o, log, "mdn K=" + std::to_string(k), true);
    write_ensemble_dir(out / ("k" + std::to_string(k)), r, kcfg);
    std::vector<double> finals;
    for (const auto& h : r.histories) finals.push_back(h.validation.back());
    double mean = 0.0, var = 0.0;
    for (double v : finals) mean += v / static_cast<double>(finals.size());
    for (double v : finals) var += (v - mean) * (v - mean);
    const double sd = finals.size() > 1 ? std::sqrt(var / static_cast<double>(finals.size() - 1)) : 0.0;
    csv << k << ',' << mean << ',' << sd << ',' << finals.size() << '\n';
    log << "K=" << k << " mean validation loss " << mean << '\n';
  }
  write_text(out / "ksweep.csv", csv.str());
  write_config(out, cfg);
}

void cmd_predict(const PredictCommand& opt, std::ostream& log) {
  if (opt.baseline == !opt.model.empty()) throw InvalidArgument("predict needs exactly one of --model or --baseline");
  if (opt.phantoms.empty() == opt.volume.empty())
    throw InvalidArgument("predict needs exactly one of --phantoms or --volume");
  const fs::path config_dir = opt.phantoms.empty() ? fs::path{} : phantom_config_dir(opt.phantoms);
  const ExperimentConfig cfg = resolve_config(opt.common, config_dir);
  const Provenance prov = provenance_of(cfg);
  const fs::path out = opt.common.out;

  std::optional<DeepEnsemble> ens;
  if (!opt.baseline)
    ens = read_ensemble(fs::is_directory(opt.model) ? fs::path(opt.model) / kEnsembleManifest : fs::path(opt.model));
  const std::string name = !opt.name.empty() ? opt.name : (ens ? to_string(ens->spec.kind) : std::string("lsq"));

  KeyValueFile manifest;
  manifest.set("model", name);
  manifest.set("kind", ens ? "ensemble" : "baseline");
  if (ens) {
    manifest.set("head", to_string(ens->spec.kind));
    manifest.set("k", std::to_string(ens->spec.k));
    manifest.set("members", std::to_string(ens->size()));
  }
  manifest.set("source", opt.phantoms.empty() ? opt.volume.string() : opt.phantoms.string());

  const auto run_one = [&](const std::string& stem, const VoxelStack& stack, std::uint64_t index) {
    InferenceResult r;
    if (ens) {
      PredictOptions po;
      po.samples_per_member = cfg.samples_per_member;
      po.seed = derive_seed(cfg.seed, kStreamPredict, index);
      po.keep_samples = opt.dump_samples;
      po.workers = cfg.workers;
      r = predict_ensemble(*ens, stack, po);
    } else {
      r = predict_baseline(stack, FitOptions{}, cfg.workers);
    }
    write_prediction(out / (stem + ".ivuqpr"), r.volume, prov);
    if (r.samples) write_samples(out / (stem + ".ivuqsm"), *r.samples, prov);
    manifest.add("file", stem);
    if (r.degenerate > 0) log << stem << ": " << r.degenerate << " degenerate voxels excluded\n";
    return r.predicted;
  };

  fs::create_directories(out);
  std::size_t voxels = 0;
  if (!opt.phantoms.empty()) {
    require_dir(opt.phantoms, "phantom");
    const auto entries = read_phantom_manifest(opt.phantoms);
    for (std::size_t j = 0; j < entries.size(); ++j) {
      const PhantomVolume ph = read_phantom(opt.phantoms / (entries[j].stem + ".ivuqph"), cfg.schedule);
      VoxelStack stack{static_cast<std::uint32_t>(ph.width), static_cast<std::uint32_t>(ph.height), 1,
                       &ph.schedule, ph.signals, ph.roi_label};
      voxels += run_one(entries[j].stem, stack, j);
    }
  } else {
    const VolumeInput vol = read_volume(opt.volume);
    VoxelStack stack{vol.x, vol.y, vol.z, &vol.schedule, vol.signals, vol.mask};
    voxels += run_one(opt.volume.stem().string(), stack, 0);
  }
  write_text(out / kPredictionManifest, "# " + provenance_line(cfg) + "\n" + manifest.to_string());
  log << name << ": predicted " << voxels << " voxels into " << out.string() << '\n';
}

void cmd_evaluate(const EvaluateCommand& opt, std::ostream& log) {
  if (opt.predictions.empty()) throw InvalidArgument("evaluate needs at least one --predictions directory");
  if (opt.phantoms.empty() == opt.volume.empty())
    throw InvalidArgument("evaluate needs exactly one of --phantoms or --volume");
  const fs::path config_dir = opt.phantoms.empty() ? fs::path{} : phantom_config_dir(opt.phantoms);
  const ExperimentConfig cfg = resolve_config(opt.common, config_dir);
  const std::string prov = provenance_line(cfg);
  const fs::path out = opt.common.out;

  std::vector<std::pair<std::string, fs::path>> models;
  for (const fs::path& dir : opt.predictions) {
    require_dir(dir, "prediction");
    models.emplace_back(KeyValueFile::load(dir / kPredictionManifest).get("model"), dir);
  }

  if (!opt.volume.empty()) {
    const VolumeInput vol = read_volume(opt.volume);
    std::vector<std::uint8_t> mask = vol.mask;
    if (!opt.mask.empty()) {
      std::ifstream in(opt.mask, std::ios::binary);
      if (!in) throw IoError("cannot open " + opt.mask.string());
      mask.assign(std::istreambuf_iterator<char>(in), {});
      if (mask.size() != vol.voxels())
        throw FormatError(opt.mask.string() + ": mask has " + std::to_string(mask.size()) + " voxels, volume has " +
                          std::to_string(vol.voxels()));
    }
    if (mask.empty()) throw InvalidArgument("ROI mode needs a mask (sidecar 'mask' entry or --mask)");
    const std::string subject = opt.volume.stem().string();
    std::vector<RoiRow> rows;
    for (const auto& [model, dir] : models) {
      const PredictionVolume pred = read_prediction(dir / (subject + ".ivuqpr"));
      const auto r = roi_summary(model, subject, pred, mask);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    write_roi_csv(out / "roi.csv", rows, prov);
    log << "wrote " << (out / "roi.csv").string() << '\n';
    return;
  }

  require_dir(opt.phantoms, "phantom");
  const auto entries = read_phantom_manifest(opt.phantoms);
  PhantomEvaluator ev;
  for (const auto& e : entries) {
    const fs::path truth_file = opt.phantoms / (e.stem + ".ivuqph");
    if (!fs::exists(truth_file)) throw IoError("missing ground truth " + truth_file.string());
    const PhantomVolume ph = read_phantom(truth_file, cfg.schedule);
    const TruthView tv{ph.snr, ph.roi_label, ph.truth};
    for (const auto& [model, dir] : models) {
      const fs::path pred_file = dir / (e.stem + ".ivuqpr");
      if (!fs::exists(pred_file)) throw IoError("missing prediction " + pred_file.string() + " for " + e.stem);
      const PredictionVolume pred = read_prediction(pred_file);
      const fs::path sample_file = dir / (e.stem + ".ivuqsm");
      if (fs::exists(sample_file)) {
        const SampleDump samples = read_samples(sample_file);
        ev.add(model, tv, pred, &samples);
      } else {
        ev.add(model, tv, pred);
      }
    }
  }
  const EvaluationReport rep = ev.report();
  write_accuracy_csv(out / "accuracy.csv", rep, prov);
  write_uq_csv(out / "uq.csv", rep, prov);
  write_calibration_csv(out / "calibration.csv", rep, prov);
  write_uncertainty_csv(out / "uncertainty.csv", rep, prov);
  log << "evaluated " << models.size() << " model(s) on " << entries.size() << " phantoms into " << out.string()
      << '\n';
}

void cmd_report(const ReportCommand& opt, std::ostream& log) {
  const fs::path dir = opt.evaluation.empty() ? opt.common.out : opt.evaluation;
  std::ostringstream md;
  bool any = false;

  if (fs::exists(dir / "accuracy.csv")) {
    any = true;
    const CsvTable t = read_csv(dir / "accuracy.csv");
    md << "<!-- " << t.comment << " -->\n\n## Accuracy\n\nMedian over phantoms (MAD in parentheses).\n\n"
       << "| model | parameter | SNR | MdAE | MdB | RCV |\n|---|---|---|---|---|---|\n";
    const auto c = [&](const char* n) { return t.column(n); };
    for (const auto& r : t.rows)
      md << "| " << r[c("model")] << " | " << r[c("parameter")] << " | " << r[c("snr")] << " | "
         << fixed(std::stod(r[c("mdae_median")]), 3) << " (" << fixed(std::stod(r[c("mdae_mad")]), 3) << ") | "
         << fixed(std::stod(r[c("mdb_median")]), 3) << " (" << fixed(std::stod(r[c("mdb_mad")]), 3) << ") | "
         << fixed(std::stod(r[c("rcv_median")]), 3) << " (" << fixed(std::stod(r[c("rcv_mad")]), 3) << ") |\n";
  }
  if (fs::exists(dir / "uq.csv")) {
    any = true;
    const CsvTable t = read_csv(dir / "uq.csv");
    md << "\n## Predictive distributions (all SNRs)\n\n"
       << "| model | parameter | CRPS | PINAW90 | miscalibration area (%) |\n|---|---|---|---|---|\n";
    const auto c = [&](const char* n) { return t.column(n); };
    for (const auto& r : t.rows) {
      if (r[c("snr")] != "all") continue;
      md << "| " << r[c("model")] << " | " << r[c("parameter")] << " | " << sci(std::stod(r[c("crps_median")]))
         << " (" << sci(std::stod(r[c("crps_mad")])) << ") | " << fixed(std::stod(r[c("pinaw90")]), 3) << " | "
         << fixed(100.0 * std::stod(r[c("miscalibration_area")]), 2) << " |\n";
    }
  }
  if (fs::exists(dir / "uncertainty.csv")) {
    any = true;
    const CsvTable t = read_csv(dir / "uncertainty.csv");
    const auto c = [&](const char* n) { return t.column(n); };
    // model -> snr -> parameter -> (au, eu)
    std::map<std::string, std::map<std::string, std::map<std::string, std::pair<double, double>>>> grid;
    std::vector<std::string> order;
    for (const auto& r : t.rows) {
      if (!grid.count(r[c("model")])) order.push_back(r[c("model")]);
      grid[r[c("model")]][r[c("snr")]][r[c("parameter")]] = {std::stod(r[c("au_median")]),
                                                             std::stod(r[c("eu_median")])};
    }
    md << "\n## Uncertainty (median, % of prior range)\n\n"
       << "| model | SNR | AU D | AU f | AU Dstar | EU D | EU f | EU Dstar |\n|---|---|---|---|---|---|---|---|\n";
    for (const auto& model : order)
      for (const auto& [snr, params] : grid[model]) {
        const auto get = [&](const char* p, bool au) {
          const auto it = params.find(p);
          return it == params.end() ? std::nan("") : (au ? it->second.first : it->second.second);
        };
        md << "| " << model << " | " << snr << " | " << fixed(get("D", true), 2) << " | " << fixed(get("f", true), 2)
           << " | " << fixed(get("Dstar", true), 2) << " | " << fixed(get("D", false), 2) << " | "
           << fixed(get("f", false), 2) << " | " << fixed(get("Dstar", false), 2) << " |\n";
      }
  }
  if (fs::exists(dir / "roi.csv")) {
    any = true;
    const CsvTable t = read_csv(dir / "roi.csv");
    const auto c = [&](const char* n) { return t.column(n); };
    md << "\n## ROI summary\n\n| model | subject | parameter | median | RCV | AU | EU | voxels |\n"
       << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : t.rows)
      md << "| " << r[c("model")] << " | " << r[c("subject")] << " | " << r[c("parameter")] << " | "
         << sci(std::stod(r[c("median")])) << " | " << fixed(std::stod(r[c("rcv")]), 3) << " | "
         << fixed(std::stod(r[c("au_median")]), 2) << " | " << fixed(std::stod(r[c("eu_median")]), 2) << " | "
         << r[c("voxels")] << " |\n";
  }
  if (!any) throw IoError("no evaluation CSVs found in " + dir.string());
  write_text(opt.common.out / "report.md", md.str());
  log << md.str();
}

}  // namespace ivuq::cli
