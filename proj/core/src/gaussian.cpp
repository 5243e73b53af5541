#include "cvsteady/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "cvsteady/error.hpp"

namespace cvsteady {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kHurwitzTol = 1e-12;
constexpr double kThresholdSnap = 1e-14;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

using CMat4 = Eigen::Matrix4cd;

// Solves T Y + Y T^H = -C for upper-triangular T, column by column from the
// right: column j only couples to columns k > j through conj(T(j, k)).
CMat4 solve_triangular_lyapunov(const CMat4& T, const CMat4& C) {
  CMat4 Y = CMat4::Zero();
  for (int j = 3; j >= 0; --j) {
    Eigen::Vector4cd rhs = -C.col(j);
    for (int k = j + 1; k < 4; ++k) rhs -= std::conj(T(j, k)) * Y.col(k);
    CMat4 shifted = T;
    shifted.diagonal().array() += std::conj(T(j, j));
    Y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return Y;
}

}  // namespace

SystemParams::SystemParams(double omega1, double omega2, double J,
                           double gamma1, double gamma2)
    : omega1_(omega1), omega2_(omega2), J_(J), gamma1_(gamma1), gamma2_(gamma2) {
  require(std::isfinite(omega1) && omega1 > 0.0, "omega1 must be > 0");
  require(std::isfinite(omega2) && omega2 > 0.0, "omega2 must be > 0");
  require(std::isfinite(J) && J >= 0.0, "J must be >= 0");
  require(std::isfinite(gamma1) && gamma1 >= 0.0, "gamma1 must be > 0");
  require(std::isfinite(gamma2) && gamma2 >= 0.0, "gamma2 must be > 0");
  // Undamped modes have no steady state.
  if (gamma1 == 0.0 || gamma2 == 0.0)
    throw NotStable("zero damping rate: no steady state exists");
}

BathSpec::BathSpec(double nbar, double r, double phi) : nbar_(nbar), r_(r) {
  require(std::isfinite(nbar) && nbar >= 0.0, "nbar must be >= 0");
  require(std::isfinite(r) && r >= 0.0, "r must be >= 0");
  require(std::isfinite(phi), "phi must be finite");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(phi, two_pi);
  if (wrapped < 0.0) wrapped += two_pi;
  if (wrapped >= two_pi) wrapped = 0.0;
  phi_ = wrapped;
}

bool DerivedBath::is_physical(double tol) const {
  if (!std::isfinite(N) || !std::isfinite(M.real()) || !std::isfinite(M.imag()))
    return false;
  if (N < 0.0) return false;
  const double bound = N * (N + 1.0);
  return std::norm(M) <= bound * (1.0 + tol) + tol;
}

DerivedBath derive_bath_params(const BathSpec& spec) {
  const double r = spec.r();
  const double sh = std::sinh(r);
  DerivedBath out;
  out.N = spec.nbar() * std::cosh(2.0 * r) + sh * sh;
  out.M = -0.5 * (2.0 * spec.nbar() + 1.0) * std::sinh(2.0 * r) *
          std::polar(1.0, 2.0 * spec.phi());
  return out;
}

double thermal_occupation(double omega, double T) {
  require(omega > 0.0, "omega must be > 0");
  require(T >= 0.0, "temperature must be >= 0");
  if (T == 0.0) return 0.0;
  // expm1 overflows to inf for omega/T > ~709, giving exactly 0.
  return 1.0 / std::expm1(omega / T);
}

CovarianceMatrix::CovarianceMatrix(const Mat4& m) {
  if (!m.allFinite()) throw InvalidArgument("covariance matrix has non-finite entries");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
    throw InvalidArgument("covariance matrix is not symmetric");
  m_ = 0.5 * (m + m.transpose());
}

const Mat4& symplectic_form() {
  static const Mat4 omega = [] {
    Mat4 o = Mat4::Zero();
    o(0, 1) = 1.0;
    o(1, 0) = -1.0;
    o(2, 3) = 1.0;
    o(3, 2) = -1.0;
    return o;
  }();
  return omega;
}

EntanglementResult EntanglementResult::from_nu_minus(double nu) {
  EntanglementResult res;
  res.nu_minus = nu;
  res.entangled = nu < 0.5;
  res.log_negativity = res.entangled ? -std::log2(2.0 * nu) : 0.0;
  return res;
}

Mat4 build_drift_rotating(const SystemParams& sys) {
  const double h1 = -0.5 * sys.gamma1();
  const double h2 = -0.5 * sys.gamma2();
  const double J = sys.J();
  const double delta = sys.detuning();
  Mat4 A;
  // clang-format off
  A << h1,   0.0,    0.0,   J,
       0.0,  h1,     -J,    0.0,
       0.0,  J,      h2,    delta,
       -J,   0.0,    -delta, h2;
  // clang-format on
  return A;
}

Mat2 diffusion_block(double gamma, const DerivedBath& bath) {
  const double n = bath.N + 0.5;
  Mat2 d;
  d << n + bath.M.real(), bath.M.imag(),
       bath.M.imag(), n - bath.M.real();
  return gamma * d;
}

Mat4 build_diffusion_rotating(const SystemParams& sys, const DerivedBath& bath1,
                              const DerivedBath& bath2) {
  Mat4 D = Mat4::Zero();
  D.topLeftCorner<2, 2>() = diffusion_block(sys.gamma1(), bath1);
  D.bottomRightCorner<2, 2>() = diffusion_block(sys.gamma2(), bath2);
  return D;
}

double stability_margin(const Mat4& A) {
  return A.eigenvalues().real().maxCoeff();
}

double lyapunov_residual(const Mat4& A, const Mat4& V, const Mat4& D) {
  return (A * V + V * A.transpose() + D).cwiseAbs().maxCoeff();
}

CovarianceMatrix solve_lyapunov(const Mat4& A, const Mat4& D) {
  if (!A.allFinite() || !D.allFinite())
    throw InvalidArgument("drift or diffusion has non-finite entries");
  if ((D - D.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
    throw InvalidArgument("diffusion matrix is not symmetric");

  Eigen::ComplexSchur<Mat4> schur(A);
  if (schur.info() != Eigen::Success)
    throw NotStable("Schur decomposition of the drift failed");
  const CMat4& T = schur.matrixT();
  const CMat4& U = schur.matrixU();
  for (int i = 0; i < 4; ++i) {
    if (T(i, i).real() >= -kHurwitzTol)
      throw NotStable("drift is not Hurwitz (eigenvalue real part " +
                      std::to_string(T(i, i).real()) + ")");
  }

  auto solve = [&](const Mat4& rhs) -> Mat4 {
    const CMat4 C = U.adjoint() * rhs.cast<std::complex<double>>() * U;
    const CMat4 Y = solve_triangular_lyapunov(T, C);
    const Mat4 V = (U * Y * U.adjoint()).real();
    return 0.5 * (V + V.transpose());
  };

  Mat4 V = solve(D);
  // One step of iterative refinement if the residual is not at round-off.
  const Mat4 residual = A * V + V * A.transpose() + D;
  const double scale = std::max(1.0, D.cwiseAbs().maxCoeff());
  if (residual.cwiseAbs().maxCoeff() > 1e-13 * scale) {
    V += solve(0.5 * (residual + residual.transpose()));
  }
  return CovarianceMatrix(V);
}

CovarianceMatrix rotating_steady_state(const SystemParams& sys,
                                       const BathSpec& bath1,
                                       const BathSpec& bath2) {
  const Mat4 A = build_drift_rotating(sys);
  const Mat4 D = build_diffusion_rotating(sys, derive_bath_params(bath1),
                                          derive_bath_params(bath2));
  return solve_lyapunov(A, D);
}

Mat4 partial_transpose(const Mat4& V) {
  Mat4 out = V;
  out.row(3) *= -1.0;
  out.col(3) *= -1.0;
  return out;
}

SymplecticSpectrum symplectic_eigenvalues(const Mat4& V) {
  Eigen::SelfAdjointEigenSolver<Mat4> eig(V);
  if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 0.0))
    throw NotPositiveDefinite("covariance matrix is not positive definite");
  const Mat4 root = eig.eigenvectors() *
                    eig.eigenvalues().cwiseSqrt().asDiagonal() *
                    eig.eigenvectors().transpose();
  const Mat4 K = root * symplectic_form() * root;
  const CMat4 H = std::complex<double>(0.0, 1.0) * K.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<CMat4> herm(H, Eigen::EigenvaluesOnly);
  const Eigen::Vector4d e = herm.eigenvalues();  // ascending: -nu2, -nu1, nu1, nu2
  SymplecticSpectrum s;
  s.nu_minus = 0.5 * (e(2) - e(1));
  s.nu_plus = 0.5 * (e(3) - e(0));
  return s;
}

SymplecticSpectrum symplectic_eigenvalues_invariants(const Mat4& V) {
  const double det_a = V.topLeftCorner<2, 2>().determinant();
  const double det_b = V.bottomRightCorner<2, 2>().determinant();
  const double det_c = V.topRightCorner<2, 2>().determinant();
  const double det_v = V.determinant();
  const double delta = det_a + det_b + 2.0 * det_c;
  const double disc = std::sqrt(std::max(0.0, delta * delta - 4.0 * det_v));
  SymplecticSpectrum s;
  s.nu_minus = std::sqrt(std::max(0.0, 0.5 * (delta - disc)));
  s.nu_plus = std::sqrt(0.5 * (delta + disc));
  return s;
}

EntanglementResult log_negativity(const CovarianceMatrix& V) {
  const auto spectrum = symplectic_eigenvalues(partial_transpose(V.matrix()));
  // Separable states that sit on the threshold (vacuum, passive coupling)
  // come back a few ulps below 1/2; snap them so E_N is exactly zero.
  double nu = spectrum.nu_minus;
  if (std::abs(nu - 0.5) <= kThresholdSnap) nu = 0.5;
  return EntanglementResult::from_nu_minus(nu);
}

double physicality_margin(const Mat4& V) {
  const CMat4 H = V.cast<std::complex<double>>() +
                  std::complex<double>(0.0, 0.5) *
                      symplectic_form().cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<CMat4> eig(H, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

bool is_physical(const CovarianceMatrix& V, double tol) {
  if (physicality_margin(V.matrix()) < -tol) return false;
  try {
    return symplectic_eigenvalues(V.matrix()).nu_minus >= 0.5 - tol;
  } catch (const NotPositiveDefinite&) {
    return false;
  }
}

}  // namespace cvsteady
