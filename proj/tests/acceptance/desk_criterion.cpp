#include <cmath>
#include <iostream>
#include <sstream>

#include "acceptance.hpp"
#include "ivuq/evaluation.hpp"
#include "ivuq/inference.hpp"
#include "ivuq/rng.hpp"

namespace ivuq::acceptance {

namespace {

constexpr double kSnrs[] = {25.0, 50.0, 100.0};
constexpr std::size_t kD = 0, kF = 1, kDStar = 2;

std::string num(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

struct Check {
  const char* id;
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " (violated)");
  }
};

}  // namespace

Outcome desk_reproduction(const DeskScale& s) {
  const PriorRanges ranges;
  const BValueSchedule schedule = BValueSchedule::standard();

  CorpusOptions corpus;
  corpus.n = s.n_train;
  corpus.seed = derive_seed(s.seed, 0x636f72707573);
  corpus.workers = s.workers;
  const auto [train_set, val_set] = split_train_validation(sample_training_set(corpus), 0.8, derive_seed(s.seed, 7));

  struct Model {
    const char* name;
    HeadSpec spec;
    DeepEnsemble ens;
  };
  std::vector<Model> models{{"mdn", HeadSpec::mdn(s.k), {}}, {"gaussian", HeadSpec::gaussian(), {}},
                            {"point", HeadSpec::point(), {}}};
  for (Model& m : models) {
    EnsembleTrainOptions o;
    o.spec = m.spec;
    o.train.epochs = s.epochs;
    o.members = s.members;
    o.base_seed = s.seed;
    o.workers = s.workers;
    const std::size_t every = std::max<std::size_t>(1, s.epochs / 5);
    const auto r = train_ensemble(train_set, &val_set, o, [&](std::size_t member, std::size_t epoch, double tl, double vl) {
      if ((epoch + 1) % every == 0)
        std::cerr << "  " << m.name << " member " << member << " epoch " << epoch + 1 << " train " << tl
                  << " validation " << vl << std::endl;
    });
    m.ens = r.ensemble;
  }

  PhantomEvaluator ev;
  for (std::size_t si = 0; si < 3; ++si)
    for (std::size_t i = 0; i < s.phantoms_per_snr; ++i) {
      const PhantomVolume ph = generate_phantom(kSnrs[si], ranges, schedule, phantom_seed(s.seed, si, i));
      const VoxelStack stack{static_cast<std::uint32_t>(ph.width), static_cast<std::uint32_t>(ph.height), 1,
                             &ph.schedule, ph.signals, ph.roi_label};
      const TruthView tv{ph.snr, ph.roi_label, ph.truth};
      for (const Model& m : models) {
        PredictOptions po;
        po.samples_per_member = 100;
        po.seed = derive_seed(s.seed, si, i);
        po.keep_samples = m.spec.probabilistic();
        po.workers = s.workers;
        const InferenceResult r = predict_ensemble(m.ens, stack, po);
        ev.add(m.name, tv, r.volume, r.samples ? &*r.samples : nullptr);
      }
      const InferenceResult lsq = predict_baseline(stack, FitOptions{}, s.workers);
      ev.add("lsq", tv, lsq.volume);
    }
  const EvaluationReport rep = ev.report();

  const auto au = [&](std::size_t p, double snr) { return rep.find_uncertainty("mdn", p, snr)->au.median; };
  const auto eu = [&](std::size_t p, double snr) { return rep.find_uncertainty("mdn", p, snr)->eu.median; };

  Check a{"a"}, b{"b"}, c{"c"}, d{"d"}, e{"e"}, f{"f"};
  for (double snr : kSnrs) {
    a.require(au(kDStar, snr) > au(kF, snr) && au(kF, snr) > au(kD, snr),
              "SNR " + num(snr) + " AU D*/f/D " + num(au(kDStar, snr)) + "/" + num(au(kF, snr)) + "/" +
                  num(au(kD, snr)));
    for (std::size_t p = 0; p < kNumParams; ++p)
      c.require(eu(p, snr) < 0.5 * au(p, snr), std::string(kParamNames[p]) + "@" + num(snr) + " EU/AU " +
                                                   num(eu(p, snr) / au(p, snr)));
  }
  for (std::size_t p = 0; p < kNumParams; ++p)
    b.require(au(p, 25) > au(p, 50) && au(p, 50) > au(p, 100),
              std::string(kParamNames[p]) + " AU " + num(au(p, 25)) + ">" + num(au(p, 50)) + ">" + num(au(p, 100)));
  const double lsq_dstar = rep.find_accuracy("lsq", kDStar, 25)->mdae.median;
  for (const char* name : {"point", "gaussian", "mdn"}) {
    const double v = rep.find_accuracy(name, kDStar, 25)->mdae.median;
    d.require(v < lsq_dstar, std::string(name) + " MdAE(D*) " + num(v) + " vs lsq " + num(lsq_dstar));
  }
  for (std::size_t p : {kD, kF}) {
    const auto* mu = rep.find_uq("mdn", p, kAllSnr);
    const auto* gu = rep.find_uq("gaussian", p, kAllSnr);
    e.require(mu->pinaw90 <= gu->pinaw90,
              std::string(kParamNames[p]) + " PINAW90 " + num(mu->pinaw90) + " vs " + num(gu->pinaw90));
    f.require(mu->calibration.miscalibration_area < gu->calibration.miscalibration_area,
              std::string(kParamNames[p]) + " miscal " + num(100 * mu->calibration.miscalibration_area) + "% vs " +
                  num(100 * gu->calibration.miscalibration_area) + "%");
  }

  Outcome out{true, ""};
  std::ostringstream summary;
  for (Check* ch : {&a, &b, &c, &d, &e, &f}) {
    std::cerr << "  7" << ch->id << ": " << (ch->pass ? "PASS" : "FAIL") << " " << ch->detail.str() << std::endl;
    summary << (summary.tellp() > 0 ? ", " : "") << ch->id << " " << (ch->pass ? "pass" : "FAIL");
    out.pass = out.pass && ch->pass;
  }
  out.detail = summary.str();
  return out;
}

}  // namespace ivuq::acceptance
