#pragma once

#include "qdent/emission.hpp"

namespace qdent::detail {

// Everything about one parameter set that does not depend on the delay.
class EmissionContext {
 public:
  explicit EmissionContext(const EmissionParams& params);

  const EmissionParams& params() const { return params_; }
  double normalization() const { return normalization_; }

  // Gauss–Hermite node count used at τ; 0 when no averaging is needed
  // (σ = 0, τ < 0, or a coherent term below double resolution). At zero the
  // s_c = 0 state stands in for the average.
  int averaging_nodes(double tau) const;

  // Gaussian-averaged entangled-state density matrix at delay τ ≥ 0.
  Eigen::Matrix4cd averaged_entangled(double tau) const;

  // Nuclear-averaged intensity-weighted density matrix.
  DensityMatrix4 averaged_density(double tau) const;

  // As above for a single s_c value.
  DensityMatrix4 density_at(double s_c, double tau) const;

  // Writes the six g² values at τ into out[0..5].
  void g2_at(double tau, double* out) const;

 private:
  DensityMatrix4 assemble(const Eigen::Matrix4cd& entangled, double tau) const;

  EmissionParams params_;
  CascadePropagator propagator_;
  Populations steady_;
  double normalization_;
};

}  // namespace qdent::detail
