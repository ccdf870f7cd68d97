#include "qdent/fine_structure.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qdent {

namespace {
void require_components(double s_r, double s_c) {
  if (!std::isfinite(s_r) || !std::isfinite(s_c)) {
    throw std::invalid_argument("fine structure: non-finite splitting component");
  }
  if (s_r < 0.0) throw std::invalid_argument("fine structure: s_r must be non-negative");
}
}  // namespace

FineStructure FineStructure::from_components(double s_r, double s_c) {
  const EigenWeights w = eigenstate_weights(s_r, s_c);
  return FineStructure{s_r, s_c, splitting(s_r, s_c), w.alpha, w.beta, w.degenerate};
}

Eigen::Matrix2cd hamiltonian(double s_r, double s_c) {
  using C = std::complex<double>;
  Eigen::Matrix2cd h;
  h << C(-0.5 * s_r, 0.0), C(0.0, 0.5 * s_c), C(0.0, -0.5 * s_c), C(0.5 * s_r, 0.0);
  return h;
}

double splitting(double s_r, double s_c) { return std::hypot(s_r, s_c); }

EigenWeights eigenstate_weights(double s_r, double s_c) {
  require_components(s_r, s_c);
  const double s = splitting(s_r, s_c);
  if (s == 0.0) return {1.0, 0.0, true};
  const double ratio = s_c / (s_r + s);
  const double alpha = 1.0 / std::sqrt(1.0 + ratio * ratio);
  return {alpha, ratio * alpha, false};
}

double field_to_circular_splitting(double b_z_tesla, double slope_uev_per_tesla) {
  if (!(slope_uev_per_tesla > 0.0)) {
    throw std::invalid_argument("field_to_circular_splitting: slope must be positive");
  }
  return slope_uev_per_tesla * b_z_tesla;
}

double splitting_pdf(double s_r, double sigma, double s) {
  if (!(sigma > 0.0)) throw std::invalid_argument("splitting_pdf: sigma must be positive");
  if (s < s_r) return 0.0;
  const double norm = std::sqrt(2.0 / (std::numbers::pi * sigma * sigma));
  const double excess = s * s - s_r * s_r;  // = s_c²
  if (excess <= 0.0) {
    // s == s_r: the half-normal peak when s_r = 0, otherwise the singular edge.
    return s_r == 0.0 ? norm : std::numeric_limits<double>::infinity();
  }
  return norm * (s / std::sqrt(excess)) * std::exp(-excess / (2.0 * sigma * sigma));
}

}  // namespace qdent
