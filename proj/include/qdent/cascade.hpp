#pragma once

// Four-level rate model of the d.c.-driven biexciton cascade. Levels are
// labelled by exciton number and coherence: the coherent exciton X_C left
// behind by a detected XX photon, the incoherent exciton X_S, the biexciton XX
// and the ground state G.
//
//   d(x_c)/dτ = −(Γ_X + Γ_S + p)·x_c
//   d(x_s)/dτ = Γ_S·x_c + Γ_XX·xx + p·g − (Γ_X + p)·x_s
//   d(xx)/dτ  = p·(x_c + x_s) − Γ_XX·xx
//   d(g)/dτ   = Γ_X·(x_c + x_s) − p·g

#include <complex>

#include <Eigen/Dense>

namespace qdent {

// Rates in 1/ns.
struct CascadeParams {
  double gamma_xx = 1.0;
  double gamma_x = 1.0;
  double gamma_s = 0.0;
  double p = 0.0;

  // Throws std::invalid_argument if any rate is negative or non-finite, or if
  // a radiative rate is zero.
  void validate() const;
};

struct Populations {
  double x_c = 0.0;
  double x_s = 0.0;
  double xx = 0.0;
  double g = 0.0;

  Eigen::Vector4d as_vector() const { return {x_c, x_s, xx, g}; }
  static Populations from_vector(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }
  double sum() const { return x_c + x_s + xx + g; }
};

// Generator of the rate equations, acting on (x_c, x_s, xx, g).
Eigen::Matrix4d rate_matrix(const CascadeParams& params);

// exp(a) by scaling and squaring with a truncated Taylor series.
Eigen::Matrix4d expm_scaling_squaring(const Eigen::Matrix4d& a);

// Propagates populations under the constant rate matrix. The eigendecomposition
// is computed once; near-degenerate spectra (relative eigenvalue gap < 1e-8)
// fall back to scaling and squaring.
class CascadePropagator {
 public:
  explicit CascadePropagator(const CascadeParams& params);

  Populations evolve(const Populations& initial, double tau) const;

  bool uses_eigendecomposition() const { return use_eigen_; }
  const CascadeParams& params() const { return params_; }

 private:
  CascadeParams params_;
  Eigen::Matrix4d generator_;
  bool use_eigen_ = false;
  Eigen::Vector4cd eigenvalues_;
  Eigen::Matrix4cd eigenvectors_;
  Eigen::Matrix4cd eigenvectors_inv_;
};

// Initial condition (1, 0, 0, 0): a coherent exciton just after the XX photon.
Populations populations_after_xx(const CascadeParams& params, double tau);

// Initial condition (0, 0, 0, 1): the dot is empty just after the X photon.
Populations populations_after_x(const CascadeParams& params, double tau);

struct SteadyState {
  Populations populations;
  bool absorbing = false;  // p = 0: ground state absorbs everything
};

SteadyState steady_state(const CascadeParams& params);

}  // namespace qdent
