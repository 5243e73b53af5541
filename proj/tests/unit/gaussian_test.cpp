#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cvsteady/error.hpp"
#include "cvsteady/gaussian.hpp"
#include "../support/oracles.hpp"

using namespace cvsteady;

namespace {

double max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

Mat4 two_mode_squeezed(double r) {
  Mat4 V = Mat4::Zero();
  const double c = std::cosh(2 * r), s = std::sinh(2 * r);
  V.diagonal().setConstant(c);
  V(0, 2) = V(2, 0) = s;
  V(1, 3) = V(3, 1) = -s;
  return 0.5 * V;
}

struct RandomInstance {
  SystemParams sys;
  BathSpec b1, b2;
};

RandomInstance random_instance(std::mt19937_64& rng, bool allow_detuning = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double w1 = 0.5 + u(rng);
  const double w2 = allow_detuning && u(rng) < 0.5 ? 0.5 + u(rng) : w1;
  SystemParams sys(w1, w2, 2.0 * u(rng), 0.05 + 1.5 * u(rng), 0.05 + 1.5 * u(rng));
  BathSpec b1(2.0 * u(rng), 1.2 * u(rng), 2 * std::numbers::pi * u(rng));
  BathSpec b2(2.0 * u(rng), 1.2 * u(rng), 2 * std::numbers::pi * u(rng));
  return {sys, b1, b2};
}

}  // namespace

TEST(DeriveBath, Vacuum) {
  const DerivedBath b = derive_bath_params(BathSpec(0, 0, 0));
  EXPECT_EQ(b.N, 0.0);
  EXPECT_EQ(std::abs(b.M), 0.0);
}

TEST(DeriveBath, SqueezedVacuum) {
  const DerivedBath b = derive_bath_params(BathSpec(0, 1, 0));
  EXPECT_NEAR(b.N, std::pow(std::sinh(1.0), 2), 1e-14);
  EXPECT_NEAR(b.N, 1.3810978455418157, 1e-14);
  EXPECT_NEAR(b.M.real(), -0.5 * std::sinh(2.0), 1e-14);
  EXPECT_NEAR(b.M.real(), -1.8134302039235095, 1e-14);
  EXPECT_NEAR(b.M.imag(), 0.0, 1e-15);
  // Pure squeezed vacuum saturates |M|^2 = N(N+1).
  EXPECT_NEAR(std::norm(b.M), b.N * (b.N + 1), 1e-12);
  EXPECT_TRUE(b.is_physical());
}

TEST(DeriveBath, SqueezedThermalWithPhase) {
  const DerivedBath b = derive_bath_params(BathSpec(1, 0.5, std::numbers::pi / 4));
  EXPECT_NEAR(b.N, std::cosh(1.0) + std::pow(std::sinh(0.5), 2), 1e-14);
  EXPECT_NEAR(b.M.real(), 0.0, 1e-14);
  EXPECT_NEAR(b.M.imag(), -1.5 * std::sinh(1.0), 1e-14);
  EXPECT_LT(std::abs(b.M), std::sqrt(b.N * (b.N + 1)));
}

TEST(DeriveBath, RandomPhysical) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const DerivedBath b = derive_bath_params(BathSpec(3 * u(rng), 2 * u(rng), 7 * u(rng)));
    EXPECT_TRUE(b.is_physical());
  }
}

TEST(BathSpec, RejectsInvalid) {
  EXPECT_THROW(BathSpec(-0.1, 0, 0), InvalidArgument);
  EXPECT_THROW(BathSpec(0, -0.1, 0), InvalidArgument);
  EXPECT_THROW(BathSpec(NAN, 0, 0), InvalidArgument);
}

TEST(SystemParams, RejectsInvalid) {
  EXPECT_THROW(SystemParams(1, 1, -0.1, 0.5, 0.5), InvalidArgument);
  EXPECT_THROW(SystemParams(0, 1, 0.1, 0.5, 0.5), InvalidArgument);
  EXPECT_THROW(SystemParams(1, 1, 0.1, -0.5, 0.5), InvalidArgument);
  EXPECT_THROW(SystemParams(1, 1, 0.1, 0.0, 0.5), NotStable);
}

TEST(ThermalOccupation, Limits) {
  EXPECT_EQ(thermal_occupation(1.0, 0.0), 0.0);
  EXPECT_NEAR(thermal_occupation(1.0, 1.0), 1.0 / (std::exp(1.0) - 1.0), 1e-15);
  EXPECT_NEAR(thermal_occupation(1.0, 1e6), 1e6 - 0.5, 1e-3);
}

TEST(Drift, ResonantSymmetric) {
  const double g = 0.5, J = 0.7;
  Mat4 expected;
  expected << -g / 2, 0, 0, J,
              0, -g / 2, -J, 0,
              0, J, -g / 2, 0,
              -J, 0, 0, -g / 2;
  EXPECT_EQ(build_drift_rotating(SystemParams::symmetric(1, J, g)), expected);
}

TEST(Drift, Decoupled) {
  const Mat4 A = build_drift_rotating(SystemParams(1, 1, 0, 0.3, 0.8));
  Mat4 expected = Mat4::Zero();
  expected.diagonal() << -0.15, -0.15, -0.4, -0.4;
  EXPECT_EQ(A, expected);
}

TEST(Drift, SymmetricPartIsDamping) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const RandomInstance in = random_instance(rng);
    const Mat4 A = build_drift_rotating(in.sys);
    Mat4 damping = Mat4::Zero();
    damping.diagonal() << in.sys.gamma1(), in.sys.gamma1(), in.sys.gamma2(), in.sys.gamma2();
    EXPECT_LT(max_abs(A + A.transpose() + damping), 1e-15);
    EXPECT_LT(stability_margin(A), 0.0);
  }
}

TEST(Drift, DetuningRotatesModeTwo) {
  // Mode 2 alone (J = 0) rotates at delta = omega2 - omega1 in the frame of mode 1.
  const Mat4 A = build_drift_rotating(SystemParams(1.0, 1.3, 0.0, 0.2, 0.2));
  EXPECT_NEAR(A(2, 3), 0.3, 1e-15);
  EXPECT_NEAR(A(3, 2), -0.3, 1e-15);
  EXPECT_EQ(A(0, 1), 0.0);
}

TEST(Diffusion, VacuumBlock) {
  const Mat4 D = build_diffusion_rotating(SystemParams::symmetric(1, 0.7, 0.5),
                                          DerivedBath{}, DerivedBath{});
  EXPECT_EQ(D, (0.25 * Mat4::Identity()).eval());
}

TEST(Diffusion, SqueezedVacuumFixedPointPinsSign) {
  for (double r : {0.1, 0.5, 1.0}) {
    const CovarianceMatrix V = rotating_steady_state(
        SystemParams::symmetric(1, 0, 0.5), BathSpec(0, r, 0), BathSpec(0, 0, 0));
    EXPECT_NEAR(V(0, 0), 0.5 * std::exp(-2 * r), 1e-13);
    EXPECT_NEAR(V(1, 1), 0.5 * std::exp(2 * r), 1e-13);
    EXPECT_NEAR(V(0, 1), 0.0, 1e-14);
    EXPECT_NEAR(V(2, 2), 0.5, 1e-14);
  }
}

TEST(Lyapunov, ThermalFixedPoint) {
  const double g = 0.4, n = 1.7;
  const Mat4 A = -(g / 2) * Mat4::Identity();
  const Mat4 D = g * (n + 0.5) * Mat4::Identity();
  const CovarianceMatrix V = solve_lyapunov(A, D);
  EXPECT_LT(max_abs(V.matrix() - (n + 0.5) * Mat4::Identity()), 1e-13);
}

TEST(Lyapunov, MatchesKroneckerOracleOnRandomInstances) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const RandomInstance in = random_instance(rng);
    const Mat4 A = build_drift_rotating(in.sys);
    const Mat4 D = build_diffusion_rotating(in.sys, derive_bath_params(in.b1),
                                            derive_bath_params(in.b2));
    const CovarianceMatrix V = solve_lyapunov(A, D);
    const Mat4 ref = oracle::kronecker_lyapunov(A, D);
    const double scale = std::max(1.0, max_abs(ref));
    ASSERT_LT(max_abs(V.matrix() - ref), 1e-10 * scale) << "instance " << i;
    ASSERT_LE(lyapunov_residual(A, V.matrix(), D), 1e-10 * scale);
    ASSERT_EQ(V.matrix(), V.matrix().transpose());
  }
}

TEST(Lyapunov, RandomStableGenericMatrices) {
  // Not restricted to the physical drift structure.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    Mat4 A = Mat4::NullaryExpr([&] { return n(rng); });
    A -= (std::max(0.0, stability_margin(A)) + 0.1) * Mat4::Identity();
    Mat4 B = Mat4::NullaryExpr([&] { return n(rng); });
    const Mat4 D = B * B.transpose();
    const Mat4 ref = oracle::kronecker_lyapunov(A, D);
    const double scale = std::max(1.0, max_abs(ref));
    ASSERT_LT(max_abs(solve_lyapunov(A, D).matrix() - ref), 1e-9 * scale);
  }
}

TEST(Lyapunov, NotStable) {
  Mat4 A = build_drift_rotating(SystemParams::symmetric(1, 0.7, 0.5));
  A += 0.25 * Mat4::Identity();
  EXPECT_THROW(solve_lyapunov(A, Mat4::Identity()), NotStable);
}

TEST(CovarianceMatrix, RejectsAsymmetric) {
  Mat4 m = 0.5 * Mat4::Identity();
  m(0, 1) = 1e-6;
  EXPECT_THROW(CovarianceMatrix{m}, InvalidArgument);
}

TEST(SymplecticForm, Properties) {
  const Mat4& O = symplectic_form();
  EXPECT_EQ(O.transpose(), -O);
  EXPECT_EQ(O * O, -Mat4::Identity());
}

TEST(PartialTranspose, Examples) {
  const Mat4 vac = 0.5 * Mat4::Identity();
  EXPECT_EQ(partial_transpose(vac), vac);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    Mat4 B = Mat4::NullaryExpr([&] { return n(rng); });
    const Mat4 V = B * B.transpose();
    EXPECT_EQ(partial_transpose(partial_transpose(V)), V);
  }
  Mat4 local = vac;
  local(0, 0) = 2.0;
  local(0, 1) = local(1, 0) = 0.3;
  EXPECT_EQ(partial_transpose(local), local);
}

TEST(SymplecticEigenvalues, Examples) {
  SymplecticSpectrum s = symplectic_eigenvalues(0.5 * Mat4::Identity());
  EXPECT_NEAR(s.nu_minus, 0.5, 1e-14);
  EXPECT_NEAR(s.nu_plus, 0.5, 1e-14);

  Mat4 sq = 0.5 * Mat4::Identity();
  sq(0, 0) = 3.0;
  sq(1, 1) = 1.0 / 12.0;
  s = symplectic_eigenvalues(sq);
  EXPECT_NEAR(s.nu_minus, 0.5, 1e-12);
  EXPECT_NEAR(s.nu_plus, 0.5, 1e-12);

  s = symplectic_eigenvalues(2.3 * Mat4::Identity());
  EXPECT_NEAR(s.nu_minus, 2.3, 1e-13);
  EXPECT_NEAR(s.nu_plus, 2.3, 1e-13);

  Mat4 mixed = Mat4::Zero();
  mixed.diagonal() << 0.7, 0.7, 1.9, 1.9;
  s = symplectic_eigenvalues(mixed);
  EXPECT_NEAR(s.nu_minus, 0.7, 1e-13);
  EXPECT_NEAR(s.nu_plus, 1.9, 1e-13);
}

TEST(SymplecticEigenvalues, NotPositiveDefinite) {
  Mat4 V = 0.5 * Mat4::Identity();
  V(2, 2) = -0.1;
  EXPECT_THROW(symplectic_eigenvalues(V), NotPositiveDefinite);
  EXPECT_THROW(symplectic_eigenvalues(Mat4::Zero()), NotPositiveDefinite);
}

TEST(SymplecticEigenvalues, BothPathsAgreeAndMatchReference) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    const RandomInstance in = random_instance(rng);
    const CovarianceMatrix V = rotating_steady_state(in.sys, in.b1, in.b2);
    const Mat4 Vt = partial_transpose(V.matrix());
    const SymplecticSpectrum g = symplectic_eigenvalues(Vt);
    const SymplecticSpectrum inv = symplectic_eigenvalues_invariants(Vt);
    const double scale = std::max(1.0, g.nu_plus);
    ASSERT_NEAR(g.nu_minus, inv.nu_minus, 1e-10 * scale);
    ASSERT_NEAR(g.nu_plus, inv.nu_plus, 1e-10 * scale);
    ASSERT_NEAR(g.nu_minus, oracle::nu_minus_reference(V.matrix()), 1e-9 * scale);
  }
}

TEST(SymplecticEigenvalues, InvariantUnderSymplecticMaps) {
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 300; ++i) {
    const RandomInstance in = random_instance(rng);
    const Mat4 V = rotating_steady_state(in.sys, in.b1, in.b2).matrix();
    const Mat4 S = oracle::random_symplectic(rng);
    ASSERT_LT(max_abs(S.transpose() * symplectic_form() * S - symplectic_form()), 1e-12);
    const Mat4 W = S.transpose() * V * S;
    const SymplecticSpectrum a = symplectic_eigenvalues(V);
    const SymplecticSpectrum b = symplectic_eigenvalues(0.5 * (W + W.transpose()));
    ASSERT_NEAR(a.nu_minus, b.nu_minus, 1e-9 * std::max(1.0, a.nu_plus));
    ASSERT_NEAR(a.nu_plus, b.nu_plus, 1e-9 * std::max(1.0, a.nu_plus));
  }
}

TEST(LogNegativity, Vacuum) {
  const EntanglementResult e = log_negativity(CovarianceMatrix::vacuum());
  EXPECT_NEAR(e.nu_minus, 0.5, 1e-15);
  EXPECT_EQ(e.log_negativity, 0.0);
  EXPECT_FALSE(e.entangled);
}

TEST(LogNegativity, TwoModeSqueezedState) {
  for (double r : {0.1, 0.4, 1.2}) {
    const EntanglementResult e = log_negativity(CovarianceMatrix(two_mode_squeezed(r)));
    EXPECT_NEAR(e.nu_minus, 0.5 * std::exp(-2 * r), 1e-13);
    EXPECT_NEAR(e.log_negativity, 2 * r / std::numbers::ln2, 1e-12);
    EXPECT_TRUE(e.entangled);
  }
}

TEST(LogNegativity, PaperSteadyState) {
  const CovarianceMatrix V = rotating_steady_state(SystemParams::symmetric(1, 0.7, 0.5),
                                                   BathSpec(0, 0.1, 0), BathSpec(0, 0.1, 0));
  const EntanglementResult e = log_negativity(V);
  EXPECT_NEAR(2 * e.nu_minus, 0.9560408784, 1e-9);
  EXPECT_NEAR(e.log_negativity, -std::log2(0.9560408784), 1e-8);
  EXPECT_TRUE(e.entangled);
}

TEST(EntanglementResult, Consistency) {
  for (double nu : {0.1, 0.3, 0.4999999, 0.5, 0.5000001, 2.0}) {
    const EntanglementResult e = EntanglementResult::from_nu_minus(nu);
    EXPECT_EQ(e.entangled, nu < 0.5);
    EXPECT_EQ(e.entangled, e.log_negativity > 0.0);
    EXPECT_EQ(e.log_negativity, std::max(0.0, -std::log2(2 * nu)));
  }
}

TEST(LogNegativity, ThresholdRoundOffIsSnapped) {
  // Near-vacuum steady state with asymmetric damping; round-off used to
  // leave nu a few ulps below 1/2.
  const SystemParams sys(1.31, 1.31, 0.567, 0.097, 0.733);
  const EntanglementResult e =
      log_negativity(rotating_steady_state(sys, BathSpec(4e-17, 0, 0), BathSpec(4e-17, 0, 0)));
  EXPECT_EQ(e.nu_minus, 0.5);
  EXPECT_EQ(e.log_negativity, 0.0);
  Mat4 V = 0.5 * Mat4::Identity();
  V(0, 2) = V(2, 0) = 1e-9;
  EXPECT_GT(log_negativity(CovarianceMatrix(V)).log_negativity, 0.0);
}

TEST(LogNegativity, DependsOnSqueezingOnlyThroughTheSum) {
  // Opposite local squeezing of the two modes commutes with the coupling, so
  // (r1, r2) and (r1 + s, r2 - s) give locally equivalent steady states.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const SystemParams sys(1.0, 1.0, 1.5 * u(rng), 0.1 + u(rng), 0.1 + u(rng));
    const double n1 = 0.5 * u(rng), n2 = 0.5 * u(rng), r1 = u(rng), r2 = u(rng);
    const double s = (u(rng) - 0.5) * 2 * std::min(r1, r2);
    const double a = log_negativity(rotating_steady_state(sys, BathSpec(n1, r1, 0), BathSpec(n2, r2, 0))).nu_minus;
    const double b = log_negativity(rotating_steady_state(sys, BathSpec(n1, r1 + s, 0), BathSpec(n2, r2 - s, 0))).nu_minus;
    ASSERT_NEAR(a, b, 1e-12);
  }
}

TEST(Separability, LocalDissipationCannotEntangle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    RandomInstance in = random_instance(rng);
    const SystemParams sys(in.sys.omega1(), in.sys.omega2(), 0.0, in.sys.gamma1(),
                           in.sys.gamma2());
    const EntanglementResult e = log_negativity(rotating_steady_state(sys, in.b1, in.b2));
    ASSERT_EQ(e.log_negativity, 0.0);
    ASSERT_FALSE(e.entangled);
  }
}

TEST(Separability, UnsqueezedBathsCannotEntangle) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 300; ++i) {
    const RandomInstance in = random_instance(rng);
    const EntanglementResult e = log_negativity(rotating_steady_state(
        in.sys, BathSpec(in.b1.nbar(), 0, in.b1.phi()), BathSpec(in.b2.nbar(), 0, 0)));
    ASSERT_EQ(e.log_negativity, 0.0);
  }
}

TEST(Physicality, RandomSteadyStates) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 1000; ++i) {
    const RandomInstance in = random_instance(rng);
    const CovarianceMatrix V = rotating_steady_state(in.sys, in.b1, in.b2);
    ASSERT_TRUE(is_physical(V));
    ASSERT_GE(physicality_margin(V.matrix()), -1e-10);
    ASSERT_GE(symplectic_eigenvalues(V.matrix()).nu_minus, 0.5 - 1e-10);
  }
}

TEST(Physicality, DetectsViolation) {
  Mat4 V = 0.5 * Mat4::Identity();
  V(0, 0) = 0.2;  // x1 variance squeezed without the conjugate growing
  EXPECT_FALSE(is_physical(CovarianceMatrix(V)));
  EXPECT_LT(physicality_margin(V), -0.1);
}
