#include "qdent/polarization.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qdent {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
const Complex kI{0.0, 1.0};
}  // namespace

const char* basis_name(Basis basis) {
  switch (basis) {
    case Basis::rectilinear: return "rect";
    case Basis::diagonal: return "diag";
    case Basis::circular: return "circ";
  }
  return "?";
}

JonesVector::JonesVector(Complex h, Complex v) {
  const double norm2 = std::norm(h) + std::norm(v);
  if (std::abs(norm2 - 1.0) > 1e-12) {
    throw std::invalid_argument("JonesVector: components are not unit norm (|.|^2 = " +
                                std::to_string(norm2) + ")");
  }
  components_ << h, v;
}

JonesVector JonesVector::horizontal() { return {1.0, 0.0}; }
JonesVector JonesVector::vertical() { return {0.0, 1.0}; }
JonesVector JonesVector::diagonal() { return {kInvSqrt2, kInvSqrt2}; }
JonesVector JonesVector::antidiagonal() { return {kInvSqrt2, -kInvSqrt2}; }
JonesVector JonesVector::left() { return {kInvSqrt2, kI * kInvSqrt2}; }
JonesVector JonesVector::right() { return {kInvSqrt2, -kI * kInvSqrt2}; }

std::pair<JonesVector, JonesVector> basis_vectors(Basis basis) {
  switch (basis) {
    case Basis::rectilinear: return {JonesVector::horizontal(), JonesVector::vertical()};
    case Basis::diagonal: return {JonesVector::diagonal(), JonesVector::antidiagonal()};
    case Basis::circular: return {JonesVector::left(), JonesVector::right()};
  }
  throw std::invalid_argument("basis_vectors: unknown basis");
}

DensityMatrix4 DensityMatrix4::maximally_mixed() {
  return DensityMatrix4(Eigen::Matrix4cd::Identity() * 0.25);
}

DensityMatrix4 DensityMatrix4::pure(const Eigen::Vector4cd& amplitudes) {
  return DensityMatrix4(amplitudes * amplitudes.adjoint());
}

DensityMatrix4 DensityMatrix4::normalized() const {
  const double tr = trace();
  if (!(tr > 0.0)) throw std::domain_error("DensityMatrix4::normalized: non-positive trace");
  return DensityMatrix4(m_ / tr);
}

double DensityMatrix4::hermiticity_error() const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix4::min_eigenvalue() const {
  const Eigen::Matrix4cd herm = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool DensityMatrix4::is_physical(double trace_tol) const {
  const double tr = trace();
  return hermiticity_error() <= 1e-12 * std::max(1.0, std::abs(tr)) &&
         std::abs(tr - 1.0) <= trace_tol && min_eigenvalue() >= -1e-10;
}

Eigen::Vector4cd bell_phi_plus() {
  Eigen::Vector4cd phi;
  phi << kInvSqrt2, 0.0, 0.0, kInvSqrt2;
  return phi;
}

Eigen::Vector4cd product_ket(const JonesVector& ket_xx, const JonesVector& ket_x) {
  Eigen::Vector4cd v;
  v << ket_xx.h() * ket_x.h(), ket_xx.h() * ket_x.v(), ket_xx.v() * ket_x.h(),
      ket_xx.v() * ket_x.v();
  return v;
}

double project(const DensityMatrix4& rho, const JonesVector& ket_xx, const JonesVector& ket_x) {
  const Eigen::Vector4cd v = product_ket(ket_xx, ket_x);
  return (v.adjoint() * rho.matrix() * v)(0, 0).real();
}

CoCross co_cross(const DensityMatrix4& rho, Basis basis) {
  const auto [a, b] = basis_vectors(basis);
  CoCross out;
  out.co = 0.5 * (project(rho, a, a) + project(rho, b, b));
  out.cross = 0.5 * (project(rho, a, b) + project(rho, b, a));
  return out;
}

double fidelity_to_bell(const DensityMatrix4& rho) {
  const double tr = rho.trace();
  if (std::abs(tr - 1.0) > 1e-6) {
    throw std::invalid_argument("fidelity_to_bell: density matrix trace " + std::to_string(tr) +
                                " is not 1");
  }
  return 0.5 * (rho(0, 0).real() + rho(3, 3).real() + 2.0 * rho(0, 3).real());
}

}  // namespace qdent
