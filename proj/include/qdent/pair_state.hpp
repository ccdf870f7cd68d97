#pragma once

// Two-photon state emitted by the biexciton cascade through a fine-structure
// split exciton, as a function of the delay spent in the intermediate state.

#include <Eigen/Dense>

#include "qdent/polarization.hpp"

namespace qdent {

struct PairState {
  Eigen::Vector4cd amplitudes;  // over {HH, HV, VH, VV}, XX photon first
  double tau = 0.0;             // ns
  double phase = 0.0;           // S·τ/ħ
};

// Amplitudes (with φ = S·τ/ħ and weights α, β of the exciton eigenstates):
//   HH = (α² + e^{iφ}β²)/√2      HV =  iαβ(1 − e^{iφ})/√2
//   VH = −iαβ(1 − e^{iφ})/√2     VV = (β² + e^{iφ}α²)/√2
PairState pair_state(double s_r, double s_c, double tau);

DensityMatrix4 pure_density(const PairState& psi);

}  // namespace qdent
