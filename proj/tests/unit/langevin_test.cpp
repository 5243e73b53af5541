#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cvsteady/error.hpp"
#include "cvsteady/langevin.hpp"

using namespace cvsteady;
using namespace cvsteady::langevin;

namespace {

// Sample covariance and elementwise standard errors of the increments.
struct Moments {
  Mat4 cov = Mat4::Zero();
  Mat4 se = Mat4::Zero();
};

Moments sample_moments(const std::vector<Vec4>& xs) {
  const double n = static_cast<double>(xs.size());
  Moments m;
  Mat4 m4 = Mat4::Zero();
  for (const Vec4& x : xs) m.cov += x * x.transpose();
  m.cov /= n;
  for (const Vec4& x : xs) {
    const Mat4 d = x * x.transpose() - m.cov;
    m4 += d.cwiseProduct(d);
  }
  m.se = (m4 / (n - 1) / n).cwiseSqrt();
  return m;
}

int count_within(const Mat4& a, const Mat4& b, const Mat4& se, double k) {
  int ok = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) ok += std::abs(a(i, j) - b(i, j)) <= k * se(i, j) ? 1 : 0;
  return ok;
}

const SystemParams kPaper = SystemParams::symmetric(1.0, 0.7, 0.5);

}  // namespace

TEST(TimeStep, Limits) {
  EXPECT_NEAR(max_time_step(kPaper), 0.01 / 0.7, 1e-16);
  EXPECT_NEAR(default_time_step(kPaper), 0.2 * 0.01 / 0.7, 1e-16);
  EXPECT_NEAR(max_time_step(SystemParams(1.0, 3.0, 0.1, 0.5, 0.2)), 0.005, 1e-16);
  NoiseModel m;
  m.dt = 0.1;
  EXPECT_THROW(step_covariance(kPaper, m), InvalidArgument);
}

TEST(Noise, VacuumVariance) {
  NoiseModel m;
  m.dt = 1e-3;
  const Mat4 C = step_covariance(kPaper, m);
  EXPECT_EQ(C, (0.25e-3 * Mat4::Identity()).eval());
  const Moments s = sample_moments(generate_noise(kPaper, m, 200000));
  EXPECT_GE(count_within(s.cov, C, s.se, 4.0), 16);
}

TEST(Noise, ThermalIsIsotropic) {
  const double n = 1.3;
  NoiseModel m{derive_bath_params(BathSpec(n, 0, 0)), derive_bath_params(BathSpec(n, 0, 0)), 9, 1e-3};
  const Mat4 C = step_covariance(kPaper, m);
  EXPECT_LT((C - 0.5 * (n + 0.5) * 1e-3 * Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-18);
  const Moments s = sample_moments(generate_noise(kPaper, m, 200000));
  EXPECT_GE(count_within(s.cov, C, s.se, 4.0), 16);
}

TEST(Noise, GenericSqueezedMatchesDiffusion) {
  NoiseModel m{derive_bath_params(BathSpec(0.4, 0.6, 1.1)),
               derive_bath_params(BathSpec(0.1, 0.3, 2.5)), 42, 2e-3};
  const SystemParams sys(1.0, 1.0, 0.3, 0.8, 0.4);
  const Mat4 C = step_covariance(sys, m);
  const Mat4 F = noise_factor(sys, m);
  EXPECT_LT((F * F.transpose() - C).cwiseAbs().maxCoeff(), 1e-15);
  const Moments s = sample_moments(generate_noise(sys, m, 1000000));
  EXPECT_EQ(count_within(s.cov, C, s.se, 4.0), 16);
}

TEST(Noise, PureSqueezedVacuumIsSemidefinite) {
  // |M|^2 = N(N+1): each 2x2 block is rank one.
  NoiseModel m{derive_bath_params(BathSpec(0, 1.0, 0.3)), derive_bath_params(BathSpec(0, 0.5, 0)),
               1, 1e-3};
  const Mat4 C = step_covariance(kPaper, m);
  const Mat4 F = noise_factor(kPaper, m);
  EXPECT_LT((F * F.transpose() - C).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Noise, UnphysicalBathRejected) {
  DerivedBath bad{0.2, {0.6, 0.0}};
  NoiseModel m{bad, DerivedBath{}, 0, 1e-3};
  EXPECT_THROW(noise_factor(kPaper, m), UnphysicalBath);
  EXPECT_THROW(generate_noise(kPaper, m, 10), UnphysicalBath);
  EXPECT_THROW(run_ensemble(kPaper, m, {.n_traj = 10}), UnphysicalBath);
}

TEST(Ensemble, DeterministicMeanDecay) {
  const SystemParams sys(1.0, 1.0, 0.0, 0.6, 0.6);
  NoiseModel m;
  EnsembleOptions o;
  o.n_traj = 2;
  o.noise = false;
  o.initial_mean = Vec4(1.0, -0.5, 0.25, 2.0);
  const EnsembleEstimate e = run_ensemble(sys, m, o);
  const double euler = std::pow(1.0 - 0.3 * e.dt, static_cast<double>(e.steps));
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(e.mean(k), o.initial_mean(k) * euler, 1e-12);
    EXPECT_NEAR(e.mean(k) / o.initial_mean(k), std::exp(-0.3 * e.t_end), 1e-2 * std::exp(-0.3 * e.t_end));
  }
  EXPECT_EQ(e.V_hat, Mat4::Zero());
}

TEST(Ensemble, RejectsShortRuns) {
  NoiseModel m;
  EXPECT_THROW(run_ensemble(kPaper, m, {.n_traj = 10, .t_end = 5.0}), InvalidArgument);
}

TEST(Ensemble, ThermalFixedPoint) {
  const double n = 0.8;
  const SystemParams sys(1.0, 1.0, 0.0, 1.0, 1.0);
  NoiseModel m{derive_bath_params(BathSpec(n, 0, 0)), derive_bath_params(BathSpec(n, 0, 0)), 5, 0.0};
  const EnsembleEstimate e = run_ensemble(sys, m, {.n_traj = 20000});
  EXPECT_GE(count_within(e.V_hat, (n + 0.5) * Mat4::Identity(), e.standard_error, 3.0), 15);
}

TEST(Ensemble, SeedDeterminismAndThreadIndependence) {
  NoiseModel m{derive_bath_params(BathSpec(0, 0.3, 0)), derive_bath_params(BathSpec(0, 0.3, 0)), 77, 0.0};
  const EnsembleEstimate a = run_ensemble(kPaper, m, {.n_traj = 600});
  const EnsembleEstimate b = run_ensemble(kPaper, m, {.n_traj = 600});
  const EnsembleEstimate c = run_ensemble(kPaper, m, {.n_traj = 600, .threads = 3});
  EXPECT_EQ(a.V_hat, b.V_hat);
  EXPECT_EQ(a.standard_error, b.standard_error);
  EXPECT_EQ(a.V_hat, c.V_hat);
  EXPECT_EQ(a.mean, c.mean);
  m.seed = 78;
  EXPECT_NE(run_ensemble(kPaper, m, {.n_traj = 600}).V_hat, a.V_hat);
}

TEST(Ensemble, StandardErrorScaling) {
  NoiseModel m{derive_bath_params(BathSpec(0, 0.3, 0)), derive_bath_params(BathSpec(0, 0.3, 0)), 3, 0.0};
  const EnsembleEstimate a = run_ensemble(kPaper, m, {.n_traj = 4000});
  const EnsembleEstimate b = run_ensemble(kPaper, m, {.n_traj = 8000});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double ratio = a.standard_error(i, j) / b.standard_error(i, j);
      EXPECT_NEAR(ratio, std::sqrt(2.0), 0.2 * std::sqrt(2.0)) << i << j;
    }
}

TEST(Ensemble, NoiseSubstepsShareTheBrownianPath) {
  // (dt, 2 substeps) and (dt/2, 1 substep) draw the same normals, so with
  // zero drift coupling the final states coincide up to the drift factor.
  const SystemParams sys(1.0, 1.0, 0.0, 0.5, 0.5);
  NoiseModel coarse{DerivedBath{}, DerivedBath{}, 8, 0.002};
  NoiseModel fine = coarse;
  fine.dt = 0.001;
  const EnsembleEstimate a = run_ensemble(sys, coarse, {.n_traj = 4000, .noise_substeps = 2});
  const EnsembleEstimate b = run_ensemble(sys, fine, {.n_traj = 4000});
  EXPECT_LT((a.V_hat - b.V_hat).cwiseAbs().maxCoeff(), 0.1 * a.standard_error.maxCoeff());
}

TEST(PairwiseSum, MatchesExactSum) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * static_cast<double>(i);
  EXPECT_EQ(pairwise_sum(v.data(), v.size()), 0.5 * 999 * 1000 / 2);
  EXPECT_EQ(pairwise_sum(v.data(), 0), 0.0);
}
