#pragma once

#include <vector>

namespace qdent {

// Gauss–Hermite rule rescaled to a standard normal variable:
//   E[f(Z)] ≈ Σ weights[i]·f(nodes[i]),  Z ~ Normal(0, 1).
// Nodes are sorted ascending and exactly antisymmetric (nodes[i] = −nodes[n−1−i]).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Builds (or returns the cached) n-point rule; n must be even and ≥ 2.
// The returned reference stays valid for the lifetime of the program.
const GaussHermiteRule& gauss_hermite(int n);

// Uncached construction, exposed for testing.
GaussHermiteRule build_gauss_hermite(int n);

// Node count used to average a phase S·τ/ħ over s_c ~ Normal(0, sigma). The
// integrand oscillates with angular frequency ω = √2·σ·|τ|/ħ in the standard
// normal variable, and Gauss–Hermite only resolves it once n ≳ ω²/4; the
// requested count is doubled until it clears ω²/3 + 32.
int resolved_node_count(int requested, double sigma, double tau);

}  // namespace qdent
