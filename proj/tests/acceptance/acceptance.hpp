#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace ivuq::acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

/// Knobs for the desk-scale reproduction; defaults are the acceptance scale.
struct DeskScale {
  std::size_t n_train = 50000;
  std::size_t epochs = 300;
  std::size_t members = 5;
  std::size_t k = 10;
  std::size_t phantoms_per_snr = 20;
  std::uint64_t seed = 42;
  unsigned workers = 1;
};

Outcome gradient_correctness();
Outcome total_variance_closure();
Outcome crps_oracle();
Outcome ideal_forecaster_calibration();
Outcome k1_equivalence();
Outcome baseline_round_trip();
Outcome desk_reproduction(const DeskScale& scale);
Outcome determinism();

}  // namespace ivuq::acceptance
