#pragma once

// Single-photon polarization kets, two-photon density matrices and
// projections onto polarized photon-pair states.
//
// Two-photon operators act on the ordered product basis {HH, HV, VH, VV};
// the first factor is always the biexciton (XX) photon and the second the
// exciton (X) photon.

#include <array>
#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace qdent {

using Complex = std::complex<double>;

enum class Basis { rectilinear, diagonal, circular };

inline constexpr std::array<Basis, 3> kAllBases = {Basis::rectilinear, Basis::diagonal,
                                                   Basis::circular};

const char* basis_name(Basis basis);

// Unit-norm polarization state over {H, V}.
class JonesVector {
 public:
  // Throws std::invalid_argument unless |h|^2 + |v|^2 = 1 within 1e-12.
  JonesVector(Complex h, Complex v);

  static JonesVector horizontal();
  static JonesVector vertical();
  static JonesVector diagonal();      // (H + V)/√2
  static JonesVector antidiagonal();  // (H - V)/√2
  static JonesVector left();          // (H + iV)/√2
  static JonesVector right();         // (H - iV)/√2

  Complex h() const { return components_[0]; }
  Complex v() const { return components_[1]; }
  const Eigen::Vector2cd& components() const { return components_; }

 private:
  Eigen::Vector2cd components_;
};

// Orthonormal pair spanning the basis: (H, V), (D, A) or (L, R).
std::pair<JonesVector, JonesVector> basis_vectors(Basis basis);

// 4x4 complex matrix over {HH, HV, VH, VV}. The trace may differ from one:
// un-normalized matrices carry an intensity weight.
class DensityMatrix4 {
 public:
  DensityMatrix4() : m_(Eigen::Matrix4cd::Zero()) {}
  explicit DensityMatrix4(const Eigen::Matrix4cd& m) : m_(m) {}

  static DensityMatrix4 maximally_mixed();  // identity / 4
  static DensityMatrix4 pure(const Eigen::Vector4cd& amplitudes);

  const Eigen::Matrix4cd& matrix() const { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }

  double trace() const { return m_.trace().real(); }

  // Throws std::domain_error when the trace is not positive.
  DensityMatrix4 normalized() const;

  // Largest |m - m^†| element.
  double hermiticity_error() const;

  // Smallest eigenvalue of the Hermitian part.
  double min_eigenvalue() const;

  // Hermitian within 1e-12 (scaled by the trace), trace one within `trace_tol`
  // and no eigenvalue below -1e-10.
  bool is_physical(double trace_tol = 1e-12) const;

  DensityMatrix4& operator+=(const DensityMatrix4& other) {
    m_ += other.m_;
    return *this;
  }
  friend DensityMatrix4 operator+(DensityMatrix4 a, const DensityMatrix4& b) { return a += b; }
  friend DensityMatrix4 operator*(double s, const DensityMatrix4& a) {
    return DensityMatrix4(s * a.m_);
  }

 private:
  Eigen::Matrix4cd m_;
};

// |Φ+⟩ = (|HH⟩ + |VV⟩)/√2.
Eigen::Vector4cd bell_phi_plus();

// Product ket |xx⟩ ⊗ |x⟩ in the pair basis.
Eigen::Vector4cd product_ket(const JonesVector& ket_xx, const JonesVector& ket_x);

// ⟨xx ⊗ x| ρ |xx ⊗ x⟩.
double project(const DensityMatrix4& rho, const JonesVector& ket_xx, const JonesVector& ket_x);

// Co- and cross-polarized projections in one basis, each the mean of the two
// same-outcome or the two opposite-outcome projections.
struct CoCross {
  double co = 0.0;
  double cross = 0.0;
};
CoCross co_cross(const DensityMatrix4& rho, Basis basis);

// ⟨Φ+|ρ|Φ+⟩ for a trace-one ρ. Throws std::invalid_argument if the trace
// deviates from one by more than 1e-6.
double fidelity_to_bell(const DensityMatrix4& rho);

}  // namespace qdent
