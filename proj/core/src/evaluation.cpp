#include "ivuq/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ivuq/errors.hpp"

namespace ivuq {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class T>
void append(std::vector<T>& dst, const std::vector<T>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

std::ofstream open_csv(const fs::path& path, const std::string& header) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(10);
  if (!header.empty()) out << "# " << header << "\n";
  return out;
}

}  // namespace

std::string snr_label(double snr) {
  if (snr == kAllSnr) return "all";
  std::ostringstream out;
  out << snr;
  return out.str();
}

void PhantomEvaluator::Stratum::merge(const Stratum& o) {
  for (std::size_t p = 0; p < kNumParams; ++p) {
    append(mdae[p], o.mdae[p]);
    append(mdb[p], o.mdb[p]);
    append(rcv[p], o.rcv[p]);
    append(crps[p], o.crps[p]);
    append(width90[p], o.width90[p]);
    append(au[p], o.au[p]);
    append(eu[p], o.eu[p]);
    if (covered[p].size() < o.covered[p].size()) covered[p].resize(o.covered[p].size(), 0);
    for (std::size_t l = 0; l < o.covered[p].size(); ++l) covered[p][l] += o.covered[p][l];
    coverage_n[p] += o.coverage_n[p];
    excluded[p] += o.excluded[p];
  }
  voxels += o.voxels;
}

PhantomEvaluator::PhantomEvaluator(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.size() < 2) throw InvalidArgument("calibration needs at least 2 nominal levels");
  const auto it = std::find(levels_.begin(), levels_.end(), 90.0);
  if (it == levels_.end()) throw InvalidArgument("nominal levels must include 90 for PINAW90");
  level90_ = static_cast<std::size_t>(it - levels_.begin());
}

void PhantomEvaluator::add(const std::string& model, const TruthView& tv, const PredictionVolume& pred,
                           const SampleDump* samples) {
  const std::size_t n = pred.voxels();
  if (tv.labels.size() != n || tv.truth.size() != n)
    throw InvalidArgument("prediction volume does not match the ground-truth volume");
  if (samples && samples->voxels() != n) throw InvalidArgument("sample dump does not match the prediction volume");

  if (!models_.count(model)) model_order_.push_back(model);
  ModelData& md = models_[model];
  Stratum& st = md.by_snr[tv.snr];
  for (auto& c : st.covered) c.resize(levels_.size(), 0);

  std::array<std::vector<double>, kNumParams> pred_v, truth_v;
  std::map<std::uint8_t, std::array<std::vector<double>, kNumParams>> roi_values;
  std::vector<double> sorted;

  for (std::size_t v = 0; v < n; ++v) {
    if (tv.labels[v] == 0) continue;
    const IvimParams& t = tv.truth[v];
    const IvimParams& m = pred.map[v];
    if (std::isnan(m.d) || std::isnan(m.f) || std::isnan(m.d_star)) continue;
    ++st.voxels;
    for (std::size_t p = 0; p < kNumParams; ++p) {
      if (!md.has_truth) {
        md.truth_min[p] = md.truth_max[p] = t[p];
      } else {
        md.truth_min[p] = std::min(md.truth_min[p], t[p]);
        md.truth_max[p] = std::max(md.truth_max[p], t[p]);
      }
      pred_v[p].push_back(m[p]);
      truth_v[p].push_back(t[p]);
      roi_values[tv.labels[v]][p].push_back(m[p]);
      if (!std::isnan(pred.au[v][p])) st.au[p].push_back(pred.au[v][p]);
      if (!std::isnan(pred.eu[v][p])) st.eu[p].push_back(pred.eu[v][p]);
      if (samples) {
        const auto s = samples->of(v, p);
        sorted.assign(s.begin(), s.end());
        std::sort(sorted.begin(), sorted.end());
        st.crps[p].push_back(crps_sorted(sorted, t[p]));
        for (std::size_t l = 0; l < levels_.size(); ++l) {
          const Interval iv = prediction_interval_sorted(sorted, levels_[l]);
          if (iv.contains(t[p])) ++st.covered[p][l];
          if (l == level90_) st.width90[p].push_back(iv.width());
        }
        ++st.coverage_n[p];
      }
    }
    md.has_truth = true;
  }

  for (std::size_t p = 0; p < kNumParams; ++p) {
    if (pred_v[p].empty()) continue;
    const RelativeMetric ae = mdae(pred_v[p], truth_v[p]);
    const RelativeMetric be = mdb(pred_v[p], truth_v[p]);
    st.mdae[p].push_back(ae.value);
    st.mdb[p].push_back(be.value);
    st.excluded[p] += ae.excluded;
    for (const auto& [label, values] : roi_values) {
      try {
        st.rcv[p].push_back(rcv(values[p]));
      } catch (const UndefinedMetric&) {
        // zero-median ROI: no RCV for it
      }
    }
  }
}

EvaluationReport PhantomEvaluator::report() const {
  EvaluationReport rep;
  for (const std::string& model : model_order_) {
    const ModelData& md = models_.at(model);
    std::vector<std::pair<double, Stratum>> strata(md.by_snr.begin(), md.by_snr.end());
    Stratum all;
    for (const auto& [snr, st] : md.by_snr) all.merge(st);
    strata.emplace_back(kAllSnr, std::move(all));

    for (const auto& [snr, st] : strata) {
      for (std::size_t p = 0; p < kNumParams; ++p) {
        AccuracyRow acc{model, p, snr, median_mad(st.mdae[p]), median_mad(st.mdb[p]), median_mad(st.rcv[p]),
                        st.voxels, st.excluded[p]};
        rep.accuracy.push_back(acc);

        if (st.coverage_n[p] > 0) {
          UqRow uq;
          uq.model = model;
          uq.param = p;
          uq.snr = snr;
          uq.crps = median_mad(st.crps[p]);
          const double range = md.truth_max[p] - md.truth_min[p];
          std::vector<double> normalized(st.width90[p]);
          for (double& w : normalized) w = range > 0.0 ? w / range : kNaN;
          double mean = 0.0;
          for (double w : normalized) mean += w;
          uq.pinaw90 = normalized.empty() ? kNaN : mean / static_cast<double>(normalized.size());
          uq.pinaw90_voxel = median_mad(normalized);
          std::vector<double> observed(levels_.size());
          for (std::size_t l = 0; l < levels_.size(); ++l)
            observed[l] = static_cast<double>(st.covered[p][l]) / static_cast<double>(st.coverage_n[p]);
          uq.calibration = make_calibration_curve(levels_, std::move(observed));
          rep.uq.push_back(std::move(uq));
        }
        if (!st.au[p].empty() || !st.eu[p].empty())
          rep.uncertainty.push_back({model, p, snr, median_mad(st.au[p]), median_mad(st.eu[p])});
      }
    }
  }
  return rep;
}

const AccuracyRow* EvaluationReport::find_accuracy(const std::string& model, std::size_t param, double snr) const {
  for (const auto& r : accuracy)
    if (r.model == model && r.param == param && r.snr == snr) return &r;
  return nullptr;
}

const UqRow* EvaluationReport::find_uq(const std::string& model, std::size_t param, double snr) const {
  for (const auto& r : uq)
    if (r.model == model && r.param == param && r.snr == snr) return &r;
  return nullptr;
}

const UncertaintyRow* EvaluationReport::find_uncertainty(const std::string& model, std::size_t param,
                                                         double snr) const {
  for (const auto& r : uncertainty)
    if (r.model == model && r.param == param && r.snr == snr) return &r;
  return nullptr;
}

std::vector<RoiRow> roi_summary(const std::string& model, const std::string& subject, const PredictionVolume& pred,
                                std::span<const std::uint8_t> mask) {
  if (!mask.empty() && mask.size() != pred.voxels()) throw InvalidArgument("mask does not match prediction volume");
  std::array<std::vector<double>, kNumParams> values, au, eu;
  for (std::size_t v = 0; v < pred.voxels(); ++v) {
    if (!mask.empty() && mask[v] == 0) continue;
    const IvimParams& m = pred.map[v];
    if (std::isnan(m.d) || std::isnan(m.f) || std::isnan(m.d_star)) continue;
    for (std::size_t p = 0; p < kNumParams; ++p) {
      values[p].push_back(m[p]);
      if (!std::isnan(pred.au[v][p])) au[p].push_back(pred.au[v][p]);
      if (!std::isnan(pred.eu[v][p])) eu[p].push_back(pred.eu[v][p]);
    }
  }
  if (values[0].empty()) throw EmptyRoi("ROI of " + subject + " contains no valid voxels");
  std::vector<RoiRow> rows;
  for (std::size_t p = 0; p < kNumParams; ++p) {
    RoiRow r{model, subject, p, median(values[p]), kNaN, median(au[p]), median(eu[p]), values[p].size()};
    try {
      r.rcv = rcv(values[p]);
    } catch (const UndefinedMetric&) {
      r.rcv = kNaN;
    }
    rows.push_back(r);
  }
  return rows;
}

void write_accuracy_csv(const fs::path& path, const EvaluationReport& r, const std::string& header) {
  auto out = open_csv(path, header);
  out << "model,parameter,snr,mdae_median,mdae_mad,mdb_median,mdb_mad,rcv_median,rcv_mad,voxels,excluded_zero_truth\n";
  for (const auto& a : r.accuracy)
    out << a.model << ',' << kParamNames[a.param] << ',' << snr_label(a.snr) << ',' << a.mdae.median << ','
        << a.mdae.mad << ',' << a.mdb.median << ',' << a.mdb.mad << ',' << a.rcv.median << ',' << a.rcv.mad << ','
        << a.voxels << ',' << a.excluded << '\n';
}

void write_uq_csv(const fs::path& path, const EvaluationReport& r, const std::string& header) {
  auto out = open_csv(path, header);
  out << "model,parameter,snr,crps_median,crps_mad,pinaw90,pinaw90_median,pinaw90_mad,miscalibration_area\n";
  for (const auto& u : r.uq)
    out << u.model << ',' << kParamNames[u.param] << ',' << snr_label(u.snr) << ',' << u.crps.median << ','
        << u.crps.mad << ',' << u.pinaw90 << ',' << u.pinaw90_voxel.median << ',' << u.pinaw90_voxel.mad << ','
        << u.calibration.miscalibration_area << '\n';
}

void write_calibration_csv(const fs::path& path, const EvaluationReport& r, const std::string& header) {
  auto out = open_csv(path, header);
  out << "model,parameter,snr,nominal,observed\n";
  for (const auto& u : r.uq)
    for (std::size_t l = 0; l < u.calibration.nominal_levels.size(); ++l)
      out << u.model << ',' << kParamNames[u.param] << ',' << snr_label(u.snr) << ','
          << u.calibration.nominal_levels[l] / 100.0 << ',' << u.calibration.observed_picp[l] << '\n';
}

void write_uncertainty_csv(const fs::path& path, const EvaluationReport& r, const std::string& header) {
  auto out = open_csv(path, header);
  out << "model,parameter,snr,au_median,au_mad,eu_median,eu_mad\n";
  for (const auto& u : r.uncertainty)
    out << u.model << ',' << kParamNames[u.param] << ',' << snr_label(u.snr) << ',' << u.au.median << ','
        << u.au.mad << ',' << u.eu.median << ',' << u.eu.mad << '\n';
}

void write_roi_csv(const fs::path& path, std::span<const RoiRow> rows, const std::string& header) {
  auto out = open_csv(path, header);
  out << "model,subject,parameter,median,rcv,au_median,eu_median,voxels\n";
  for (const auto& r : rows)
    out << r.model << ',' << r.subject << ',' << kParamNames[r.param] << ',' << r.median << ',' << r.rcv << ','
        << r.au_median << ',' << r.eu_median << ',' << r.voxels << '\n';
}

}  // namespace ivuq
