#pragma once

// Exciton fine structure in a normal magnetic (nuclear) field: the 2x2
// Hamiltonian over {X_H, X_V}, the total splitting, the eigenstate weights and
// the distribution of the splitting magnitude when the circular component is
// Gaussian-distributed.

#include <Eigen/Dense>

namespace qdent {

// All energies in µeV.
struct EigenWeights {
  double alpha = 1.0;  // > 0
  double beta = 0.0;   // carries the sign of s_c
  bool degenerate = false;  // s_r = s_c = 0; weights set to (1, 0)
};

struct FineStructure {
  double s_r = 0.0;
  double s_c = 0.0;
  double s = 0.0;
  double alpha = 1.0;
  double beta = 0.0;
  bool degenerate = false;

  // Throws std::invalid_argument for negative or non-finite s_r, or non-finite s_c.
  static FineStructure from_components(double s_r, double s_c);
};

struct NuclearFieldParams {
  double sigma = 0.0;  // standard deviation of s_c
  double zeeman_slope = 0.0;  // µeV/T; 0 when unknown
};

// (1/2)·[[-s_r, i·s_c], [-i·s_c, s_r]]
Eigen::Matrix2cd hamiltonian(double s_r, double s_c);

double splitting(double s_r, double s_c);

// Weights of the H and V components of the lower eigenstate (α, iβ), with
// α² + β² = 1 and β/α = s_c/(s_r + S). Requires s_r ≥ 0.
EigenWeights eigenstate_weights(double s_r, double s_c);

// Linear Zeeman shift of the circular component; slope must be positive.
double field_to_circular_splitting(double b_z_tesla, double slope_uev_per_tesla);

// Density (per µeV) of |S| when s_c ~ Normal(0, sigma). Zero below s_r and
// +inf exactly at s = s_r > 0 (integrable singularity). Throws for sigma ≤ 0.
double splitting_pdf(double s_r, double sigma, double s);

}  // namespace qdent
