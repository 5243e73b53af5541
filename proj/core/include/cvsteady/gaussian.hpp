#pragma once

// Gaussian covariance-level description of two coupled oscillators, each
// damped by its own squeezed thermal reservoir.
//
// Conventions used throughout the library:
//   * hbar = 1, quadratures x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2))
//   * ordering (x1, p1, x2, p2)
//   * vacuum variance 1/2, so a state is entangled iff the smallest symplectic
//     eigenvalue of the partially transposed covariance is below 1/2.

#include <complex>

#include <Eigen/Core>

namespace cvsteady {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

/// Oscillator frequencies, beam-splitter coupling and energy decay rates.
class SystemParams {
 public:
  /// Throws InvalidArgument unless omega_k > 0, gamma_k > 0 and J >= 0.
  SystemParams(double omega1, double omega2, double J, double gamma1,
               double gamma2);

  /// Resonant, equal-rate shorthand.
  static SystemParams symmetric(double omega, double J, double gamma) {
    return SystemParams(omega, omega, J, gamma, gamma);
  }

  double omega1() const noexcept { return omega1_; }
  double omega2() const noexcept { return omega2_; }
  double J() const noexcept { return J_; }
  double gamma1() const noexcept { return gamma1_; }
  double gamma2() const noexcept { return gamma2_; }

  bool resonant() const noexcept { return omega1_ == omega2_; }
  /// Residual rotation of mode 2 in the frame co-rotating at omega1.
  double detuning() const noexcept { return omega2_ - omega1_; }

 private:
  double omega1_;
  double omega2_;
  double J_;
  double gamma1_;
  double gamma2_;
};

/// Squeezed thermal reservoir: occupation, squeezing strength, squeezing
/// phase. The phase is wrapped into [0, 2pi).
class BathSpec {
 public:
  BathSpec() = default;
  BathSpec(double nbar, double r, double phi);

  double nbar() const noexcept { return nbar_; }
  double r() const noexcept { return r_; }
  double phi() const noexcept { return phi_; }

 private:
  double nbar_ = 0.0;
  double r_ = 0.0;
  double phi_ = 0.0;
};

/// Effective population N and anomalous correlation M = <a a> of a bath.
/// Deliberately unvalidated so raw overrides can be represented; use
/// is_physical() before trusting one.
struct DerivedBath {
  double N = 0.0;
  std::complex<double> M{0.0, 0.0};

  /// |M|^2 <= N(N+1) up to a relative tolerance.
  bool is_physical(double tol = 1e-12) const;
};

DerivedBath derive_bath_params(const BathSpec& spec);

/// Mean thermal occupation 1/(exp(omega/T) - 1); exactly 0 at T = 0.
double thermal_occupation(double omega, double T);

/// Real symmetric 4x4 second-moment matrix.
class CovarianceMatrix {
 public:
  /// Throws InvalidArgument if `m` is not symmetric to 1e-12 elementwise.
  /// The stored matrix is the exact symmetric part of `m`.
  explicit CovarianceMatrix(const Mat4& m);

  static CovarianceMatrix vacuum() { return CovarianceMatrix(0.5 * Mat4::Identity()); }

  const Mat4& matrix() const noexcept { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  Mat4 m_;
};

/// Omega = J2 (+) J2 with J2 = [[0, 1], [-1, 0]], so [X_i, X_j] = i Omega_ij.
const Mat4& symplectic_form();

struct SymplecticSpectrum {
  double nu_minus = 0.0;
  double nu_plus = 0.0;
};

struct EntanglementResult {
  double nu_minus = 0.0;
  double log_negativity = 0.0;
  bool entangled = false;

  /// E_N = max{0, -log2(2 nu)}; entangled iff nu < 1/2.
  static EntanglementResult from_nu_minus(double nu);
};

// -- drift and diffusion ------------------------------------------------------

/// Drift of the mean quadratures in the frame co-rotating at omega1:
/// d<X>/dt = A <X>. At resonance
///   A = [[-g1/2, 0, 0, J], [0, -g1/2, -J, 0], [0, J, -g2/2, 0], [-J, 0, 0, -g2/2]];
/// off resonance mode 2 additionally rotates at detuning().
Mat4 build_drift_rotating(const SystemParams& sys);

/// 2x2 noise block gamma * [[N + 1/2 + Re M, Im M], [Im M, N + 1/2 - Re M]].
Mat2 diffusion_block(double gamma, const DerivedBath& bath);

/// Block-diagonal diffusion D = D1 (+) D2.
Mat4 build_diffusion_rotating(const SystemParams& sys, const DerivedBath& bath1,
                              const DerivedBath& bath2);

/// Largest real part among the eigenvalues of A.
double stability_margin(const Mat4& A);

// -- steady state -------------------------------------------------------------

/// Solves A V + V A^T + D = 0 by a complex-Schur Bartels-Stewart sweep.
/// Throws NotStable when some eigenvalue of A has real part >= -1e-12.
CovarianceMatrix solve_lyapunov(const Mat4& A, const Mat4& D);

/// max |A V + V A^T + D| over all entries.
double lyapunov_residual(const Mat4& A, const Mat4& V, const Mat4& D);

/// Rotating-frame steady state for the given system and baths.
CovarianceMatrix rotating_steady_state(const SystemParams& sys,
                                       const BathSpec& bath1,
                                       const BathSpec& bath2);

// -- spectra and entanglement -------------------------------------------------

/// P V P with P = diag(1, 1, 1, -1): momentum reversal on mode 2.
Mat4 partial_transpose(const Mat4& V);

/// Symplectic eigenvalues from the Hermitian matrix i V^{1/2} Omega V^{1/2},
/// whose spectrum is {+-nu_1, +-nu_2}. Throws NotPositiveDefinite.
SymplecticSpectrum symplectic_eigenvalues(const Mat4& V);

/// Two-mode closed form from the invariants det V and
/// Delta = det A + det B + 2 det C of V = [[A, C], [C^T, B]].
SymplecticSpectrum symplectic_eigenvalues_invariants(const Mat4& V);

EntanglementResult log_negativity(const CovarianceMatrix& V);

/// Smallest eigenvalue of the Hermitian matrix V + (i/2) Omega. A covariance
/// matrix obeys the uncertainty principle iff this is >= 0.
double physicality_margin(const Mat4& V);

/// Uncertainty principle and symplectic spectrum both within `tol` of the
/// physical bound.
bool is_physical(const CovarianceMatrix& V, double tol = 1e-10);

}  // namespace cvsteady
