#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "ivuq/errors.hpp"
#include "ivuq_tools/commands.hpp"

namespace ivuq::cli {

namespace {

void add_common(CLI::App* cmd, CommonOptions& c) {
  cmd->add_option("--config", c.config, "Experiment config (key = value sections)");
  cmd->add_option("--seed", c.seed, "Master seed (overrides the config)");
  cmd->add_option("--workers", c.workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Uncertainty-aware IVIM parameter estimation with deep ensembles"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate the training corpus and evaluation phantoms");
  add_common(simulate, sim.common);
  simulate->add_option("--n", sim.n, "Training records (overrides data.n_train)");
  simulate->add_option("--phantoms", sim.phantoms, "Phantoms per SNR (overrides data.phantoms_per_snr)");

  TrainOptions tr;
  auto* train = app.add_subcommand("train", "Train a deep ensemble (or a K sweep) on a simulated corpus");
  add_common(train, tr.common);
  train->add_option("--data", tr.data, "simulate output directory")->required();
  train->add_option("--head", tr.head, "point | gaussian | mdn");
  train->add_option("--k", tr.k, "Mixture components for the mdn head");
  train->add_option("--members", tr.members, "Ensemble size");
  train->add_option("--epochs", tr.epochs, "Training epochs");
  train->add_flag("--k-sweep", tr.k_sweep, "Train mdn ensembles for each K and write ksweep.csv");
  train->add_option("--sweep-ks", tr.sweep_ks, "K values of the sweep")->delimiter(',')->capture_default_str();

  PredictCommand pr;
  auto* predict = app.add_subcommand("predict", "Parameter and uncertainty maps for phantoms or a volume");
  add_common(predict, pr.common);
  auto* model_opt = predict->add_option("--model", pr.model, "Ensemble manifest (ensemble.txt) or the train output directory");
  auto* base_opt = predict->add_flag("--baseline", pr.baseline, "Use the segmented least-squares fitter");
  model_opt->excludes(base_opt);
  auto* ph_opt = predict->add_option("--phantoms", pr.phantoms, "Phantom directory from simulate");
  auto* vol_opt = predict->add_option("--volume", pr.volume, "Volume sidecar");
  ph_opt->excludes(vol_opt);
  predict->add_flag("--dump-samples", pr.dump_samples, "Also write pooled predictive samples (.ivuqsm)");
  predict->add_option("--name", pr.name, "Model label used in reports");

  EvaluateCommand ev;
  auto* evaluate = app.add_subcommand("evaluate", "Metric tables from prediction files");
  add_common(evaluate, ev.common);
  evaluate->add_option("--predictions", ev.predictions, "Prediction directory (repeatable)")->required();
  auto* eph_opt = evaluate->add_option("--phantoms", ev.phantoms, "Phantom directory (ground truth)");
  auto* evol_opt = evaluate->add_option("--volume", ev.volume, "Volume sidecar (ROI mode)");
  eph_opt->excludes(evol_opt);
  evaluate->add_option("--mask", ev.mask, "u8 ROI mask overriding the sidecar's");

  ReportCommand rep;
  auto* report = app.add_subcommand("report", "Markdown tables from evaluate output");
  add_common(report, rep.common);
  report->add_option("--evaluation", rep.evaluation, "evaluate output directory (default: --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate) cmd_simulate(sim, std::cerr);
    if (*train) cmd_train(tr, std::cerr);
    if (*predict) cmd_predict(pr, std::cerr);
    if (*evaluate) cmd_evaluate(ev, std::cerr);
    if (*report) cmd_report(rep, std::cout);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace ivuq::cli
