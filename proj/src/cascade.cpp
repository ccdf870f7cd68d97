#include "qdent/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qdent {

void CascadeParams::validate() const {
  for (double r : {gamma_xx, gamma_x, gamma_s, p}) {
    if (!std::isfinite(r) || r < 0.0) {
      throw std::invalid_argument("CascadeParams: rates must be finite and non-negative");
    }
  }
  if (!(gamma_x > 0.0) || !(gamma_xx > 0.0)) {
    throw std::invalid_argument("CascadeParams: radiative rates must be positive");
  }
}

Eigen::Matrix4d rate_matrix(const CascadeParams& c) {
  Eigen::Matrix4d m;
  // clang-format off
  m << -(c.gamma_x + c.gamma_s + c.p), 0.0,                 0.0,         0.0,
        c.gamma_s,                     -(c.gamma_x + c.p),  c.gamma_xx,  c.p,
        c.p,                           c.p,                 -c.gamma_xx, 0.0,
        c.gamma_x,                     c.gamma_x,           0.0,         -c.p;
  // clang-format on
  return m;
}

Eigen::Matrix4d expm_scaling_squaring(const Eigen::Matrix4d& a) {
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::Matrix4d scaled = a / std::ldexp(1.0, squarings);

  Eigen::Matrix4d result = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d term = Eigen::Matrix4d::Identity();
  for (int n = 1; n <= 20; ++n) {
    term = term * scaled / static_cast<double>(n);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

CascadePropagator::CascadePropagator(const CascadeParams& params)
    : params_(params), generator_(rate_matrix(params)) {
  params_.validate();

  Eigen::EigenSolver<Eigen::Matrix4d> solver(generator_);
  if (solver.info() != Eigen::Success) return;
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();

  const double scale = std::max(eigenvalues_.cwiseAbs().maxCoeff(), 1e-300);
  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      min_gap = std::min(min_gap, std::abs(eigenvalues_[i] - eigenvalues_[j]) / scale);
    }
  }
  if (min_gap < 1e-8) return;

  Eigen::FullPivLU<Eigen::Matrix4cd> lu(eigenvectors_);
  if (!lu.isInvertible()) return;
  eigenvectors_inv_ = lu.inverse();

  // Reject ill-conditioned eigenbases as well as near-degenerate spectra.
  const Eigen::Matrix4cd rebuilt =
      eigenvectors_ * eigenvalues_.asDiagonal() * eigenvectors_inv_;
  const double residual = (rebuilt - generator_.cast<std::complex<double>>()).cwiseAbs().maxCoeff();
  use_eigen_ = residual <= 1e-10 * scale;
}

Populations CascadePropagator::evolve(const Populations& initial, double tau) const {
  if (tau < 0.0) throw std::invalid_argument("CascadePropagator::evolve: negative delay");
  if (tau == 0.0) return initial;
  const Eigen::Vector4d x0 = initial.as_vector();
  Eigen::Vector4d x;
  if (use_eigen_) {
    const Eigen::Vector4cd coeff = eigenvectors_inv_ * x0.cast<std::complex<double>>();
    Eigen::Vector4cd decayed;
    for (int i = 0; i < 4; ++i) decayed[i] = coeff[i] * std::exp(eigenvalues_[i] * tau);
    x = (eigenvectors_ * decayed).real();
  } else {
    x = expm_scaling_squaring(generator_ * tau) * x0;
  }
  // x_c decouples; its exact exponential replaces the ~1e-17 round-off floor
  // the mixed modes leave behind. g takes the difference so the sum is kept.
  const double x_c = initial.x_c * std::exp(generator_(0, 0) * tau);
  x[3] += x[0] - x_c;
  x[0] = x_c;
  return Populations::from_vector(x);
}

Populations populations_after_xx(const CascadeParams& params, double tau) {
  if (tau < 0.0) throw std::invalid_argument("populations_after_xx: negative delay");
  return CascadePropagator(params).evolve({1.0, 0.0, 0.0, 0.0}, tau);
}

Populations populations_after_x(const CascadeParams& params, double tau) {
  if (tau < 0.0) throw std::invalid_argument("populations_after_x: negative delay");
  return CascadePropagator(params).evolve({0.0, 0.0, 0.0, 1.0}, tau);
}

SteadyState steady_state(const CascadeParams& params) {
  params.validate();
  if (params.p == 0.0) return {{0.0, 0.0, 0.0, 1.0}, true};

  // Null vector of the generator, normalized by an appended row of ones.
  Eigen::Matrix<double, 5, 4> a;
  a.topRows<4>() = rate_matrix(params);
  a.row(4).setOnes();
  Eigen::Matrix<double, 5, 1> b = Eigen::Matrix<double, 5, 1>::Zero();
  b[4] = 1.0;
  const Eigen::Vector4d x = a.colPivHouseholderQr().solve(b);
  return {Populations::from_vector(x), false};
}

}  // namespace qdent
