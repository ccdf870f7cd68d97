#include "qdent/pair_state.hpp"

#include <cmath>

#include "qdent/fine_structure.hpp"
#include "qdent/units.hpp"

namespace qdent {

PairState pair_state(double s_r, double s_c, double tau) {
  const EigenWeights w = eigenstate_weights(s_r, s_c);
  const double phase = splitting(s_r, s_c) * tau / kHbar;
  const Complex e{std::cos(phase), std::sin(phase)};
  const double a2 = w.alpha * w.alpha;
  const double b2 = w.beta * w.beta;
  const Complex mixed = Complex{0.0, w.alpha * w.beta} * (1.0 - e);
  constexpr double kInvSqrt2 = 0.70710678118654752440;

  PairState psi;
  psi.amplitudes << (a2 + e * b2) * kInvSqrt2, mixed * kInvSqrt2, -mixed * kInvSqrt2,
      (b2 + e * a2) * kInvSqrt2;
  psi.tau = tau;
  psi.phase = phase;
  return psi;
}

DensityMatrix4 pure_density(const PairState& psi) { return DensityMatrix4::pure(psi.amplitudes); }

}  // namespace qdent
