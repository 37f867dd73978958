#include <chrono>
#include <exception>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "acceptance.hpp"

using namespace ivuq::acceptance;

namespace {

struct Criterion {
  int id;
  const char* title;
};

constexpr Criterion kCriteria[] = {
    {1, "gradient correctness"},
    {2, "law-of-total-variance closure"},
    {3, "CRPS oracle"},
    {4, "ideal-forecaster calibration"},
    {5, "K=1 equivalence"},
    {6, "baseline round-trip"},
    {7, "desk-scale reproduction"},
    {8, "determinism"},
};

Outcome run(int id, const DeskScale& scale) {
  switch (id) {
    case 1: return gradient_correctness();
    case 2: return total_variance_closure();
    case 3: return crps_oracle();
    case 4: return ideal_forecaster_calibration();
    case 5: return k1_equivalence();
    case 6: return baseline_round_trip();
    case 7: return desk_reproduction(scale);
    default: return determinism();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria; prints one PASS/FAIL line per criterion"};
  std::vector<int> selected;
  DeskScale scale;
  app.add_option("-c,--criterion", selected, "Criteria to run (default: all)")->check(CLI::Range(1, 8));
  app.add_option("--n-train", scale.n_train, "Desk-scale training records");
  app.add_option("--epochs", scale.epochs, "Desk-scale epochs");
  app.add_option("--members", scale.members, "Desk-scale ensemble size");
  app.add_option("--phantoms", scale.phantoms_per_snr, "Desk-scale phantoms per SNR");
  app.add_option("--seed", scale.seed, "Desk-scale master seed");
  app.add_option("--workers", scale.workers, "Worker threads");
  CLI11_PARSE(app, argc, argv);
  if (selected.empty())
    for (const auto& c : kCriteria) selected.push_back(c.id);

  int failures = 0;
  for (int id : selected) {
    const auto& c = kCriteria[id - 1];
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = run(id, scale);
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << id << " [" << c.title << "]: " << (out.pass ? "PASS" : "FAIL") << " (" << out.detail
              << "; " << secs << " s)" << std::endl;
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
