#pragma once

// Aggregation of per-voxel predictions into metric tables: accuracy
// (MdAE/MdB/RCV), uncertainty quality (CRPS, PINAW90, calibration) and the
// AU/EU summary, stratified by model and SNR. Operates on prediction
// volumes only, never on model internals.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ivuq/io.hpp"
#include "ivuq/uq_metrics.hpp"

namespace ivuq {

/// Ground truth of one phantom-like volume (label 0 = background).
struct TruthView {
  double snr = 0.0;
  std::span<const std::uint8_t> labels;
  std::span<const IvimParams> truth;
};

/// snr == kAllSnr marks the pooled stratum.
inline constexpr double kAllSnr = -1.0;

struct AccuracyRow {
  std::string model;
  std::size_t param = 0;
  double snr = kAllSnr;
  MedianMad mdae, mdb, rcv;
  std::size_t voxels = 0;
  std::size_t excluded = 0;  // truth == 0 voxels left out of MdAE/MdB
};

struct UqRow {
  std::string model;
  std::size_t param = 0;
  double snr = kAllSnr;
  MedianMad crps;
  double pinaw90 = 0.0;  // mean 90% width / R
  MedianMad pinaw90_voxel;
  CalibrationCurve calibration;
};

struct UncertaintyRow {
  std::string model;
  std::size_t param = 0;
  double snr = kAllSnr;
  MedianMad au, eu;  // percent of prior range
};

struct EvaluationReport {
  std::vector<AccuracyRow> accuracy;
  std::vector<UqRow> uq;
  std::vector<UncertaintyRow> uncertainty;

  const AccuracyRow* find_accuracy(const std::string& model, std::size_t param, double snr) const;
  const UqRow* find_uq(const std::string& model, std::size_t param, double snr) const;
  const UncertaintyRow* find_uncertainty(const std::string& model, std::size_t param, double snr) const;
};

class PhantomEvaluator {
 public:
  explicit PhantomEvaluator(std::vector<double> levels = default_levels());

  /// Adds one volume of predictions for `model`. Background voxels and voxels
  /// whose MAP is NaN are skipped. `samples`, when given, must be in physical
  /// units and cover every voxel of the volume.
  void add(const std::string& model, const TruthView& truth, const PredictionVolume& pred,
           const SampleDump* samples = nullptr);

  EvaluationReport report() const;

 private:
  struct Stratum {
    std::array<std::vector<double>, kNumParams> mdae, mdb, rcv, crps, width90, au, eu;
    std::array<std::vector<std::size_t>, kNumParams> covered;
    std::array<std::size_t, kNumParams> coverage_n{};
    std::size_t voxels = 0;
    std::array<std::size_t, kNumParams> excluded{};
    void merge(const Stratum& other);
  };
  struct ModelData {
    std::map<double, Stratum> by_snr;
    std::array<double, kNumParams> truth_min{}, truth_max{};
    bool has_truth = false;
  };

  std::vector<double> levels_;
  std::size_t level90_ = 0;
  std::vector<std::string> model_order_;
  std::map<std::string, ModelData> models_;
};

/// In-vivo style summary of one masked volume without ground truth.
struct RoiRow {
  std::string model;
  std::string subject;
  std::size_t param = 0;
  double median = 0.0;
  double rcv = 0.0;
  double au_median = 0.0;
  double eu_median = 0.0;
  std::size_t voxels = 0;
};

/// Throws EmptyRoi when no voxel inside `mask` has a finite prediction.
std::vector<RoiRow> roi_summary(const std::string& model, const std::string& subject, const PredictionVolume& pred,
                                std::span<const std::uint8_t> mask);

/// CSV writers. `header` is emitted as a leading `# ...` comment line.
void write_accuracy_csv(const std::filesystem::path& path, const EvaluationReport& r, const std::string& header);
void write_uq_csv(const std::filesystem::path& path, const EvaluationReport& r, const std::string& header);
void write_calibration_csv(const std::filesystem::path& path, const EvaluationReport& r, const std::string& header);
void write_uncertainty_csv(const std::filesystem::path& path, const EvaluationReport& r, const std::string& header);
void write_roi_csv(const std::filesystem::path& path, std::span<const RoiRow> rows, const std::string& header);

std::string snr_label(double snr);

}  // namespace ivuq
