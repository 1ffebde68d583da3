#pragma once

#include "otto/measurement.hpp"

namespace otto {

// Reference results for d = 2 obtained by enumerating every measurement
// history explicitly, with levels indexed by ascending energy. The baths are
// applied through the Kraus operators of qubit generalized amplitude damping
// and the DBN chain is summed over all ten indices, so nothing here shares
// code with the production joints.
struct HistoryOracle {
  std::array<double, 32> tpm{};  // (j, l, m, n, r), r fastest
  std::array<double, 32> dbn{};
  Eigen::Matrix2cd tpm_average;  // Σ over histories of the final projected state
};

HistoryOracle qubit_history_oracle(const CycleConfig& config, const Eigen::Matrix2cd& rho1, const Eigen::Matrix2cd& U_k,
                                   const Eigen::Matrix2cd& U_e);

}  // namespace otto
