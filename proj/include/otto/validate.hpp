#pragma once

#include <random>
#include <string>
#include <vector>

#include "otto/measurement.hpp"

namespace otto {

// Randomized config in the ranges of the figures: d in {2, 3, 4},
// lambda in [0.01, 1], g in [0, 10], omega_c in [0.3, 1.5], omega_h up to
// omega_c + 10, T_h in [0.5, 15], T_c in [0.1, T_h).
CycleConfig random_config(std::mt19937_64& rng, int d = 0);
DensityMatrix random_state(std::mt19937_64& rng, int d);
ComplexMatrix random_hermitian(std::mt19937_64& rng, int d);

struct InvariantResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;      // largest violation metric seen
  double threshold = 0.0;  // pass iff worst < threshold (or the named check holds)
  std::string detail;
};

struct ValidateOptions {
  unsigned seed = 1;
  int parallelism = 1;
  int random_configs = 24;
  FaultInjection fault = FaultInjection::None;
};

std::vector<InvariantResult> run_validation(const ValidateOptions& options);

}  // namespace otto
