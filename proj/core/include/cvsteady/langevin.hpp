#pragma once

// Monte Carlo estimate of the rotating-frame steady covariance from the
// quantum Langevin equations, sampled as a classical SDE
//   dX = A X dt + dW,   Cov(dW) = D dt,
// with A and D the drift and diffusion of the Lyapunov route. For Gaussian
// dynamics this reproduces the symmetrized second moments exactly; it says
// nothing beyond second moments.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cvsteady/gaussian.hpp"

namespace cvsteady::langevin {

/// Generator identification recorded alongside every estimate.
extern const char* const kRngAlgorithm;

struct NoiseModel {
  DerivedBath bath1;
  DerivedBath bath2;
  std::uint64_t seed = 0;
  double dt = 0.0;  // 0 selects default_time_step()
};

/// Upper bound 0.01 / max(gamma1, gamma2, J, |detuning|) on the step size.
double max_time_step(const SystemParams& sys);

/// One fifth of max_time_step(); keeps the O(dt) Euler-Maruyama bias well
/// below the statistical error at 1e5 trajectories.
double default_time_step(const SystemParams& sys);

/// Per-step noise covariance D dt.
Mat4 step_covariance(const SystemParams& sys, const NoiseModel& model);

/// Square-root factor L with L L^T = D dt, from a diagonally pivoted LDL^T.
/// Semidefinite targets (pure squeezed vacuum) get zero columns. Throws
/// UnphysicalBath if either bath violates |M|^2 <= N(N+1) or a pivot is
/// negative beyond 1e-12 relative to the largest diagonal entry.
Mat4 noise_factor(const SystemParams& sys, const NoiseModel& model);

/// Deterministic substream of zero-mean Gaussian increments with covariance
/// D dt. Stream `index` is independent of every other index for the same seed.
class NoiseGenerator {
 public:
  NoiseGenerator(const SystemParams& sys, const NoiseModel& model,
                 std::uint64_t index);
  ~NoiseGenerator();
  NoiseGenerator(NoiseGenerator&&) noexcept;
  NoiseGenerator& operator=(NoiseGenerator&&) noexcept;

  Vec4 next();
  /// Four independent standard normals, before applying the factor.
  Vec4 next_standard();
  const Mat4& factor() const noexcept { return factor_; }

  struct Engine;  // random engine plus normal sampler; defined out of line

 private:
  Mat4 factor_;
  std::unique_ptr<Engine> engine_;
};

/// First `n` increments of stream 0.
std::vector<Vec4> generate_noise(const SystemParams& sys, const NoiseModel& model,
                                 std::size_t n);

struct EnsembleOptions {
  std::size_t n_traj = 100000;
  double t_end = 0.0;  // 0 selects 10 / min(gamma)
  unsigned threads = 1;
  /// Each Euler-Maruyama step sums this many sub-increments of covariance
  /// D dt / noise_substeps. A run at (dt, 2) and one at (dt/2, 1) with the
  /// same seed follow the same Brownian path.
  unsigned noise_substeps = 1;
  bool noise = true;
  Vec4 initial_mean = Vec4::Zero();
};

struct EnsembleEstimate {
  Mat4 V_hat = Mat4::Zero();
  /// Elementwise standard error of V_hat from the sample fourth moments.
  Mat4 standard_error = Mat4::Zero();
  Vec4 mean = Vec4::Zero();
  std::size_t n_traj = 0;
  double dt = 0.0;
  double t_end = 0.0;
  std::size_t steps = 0;
  std::string rng;
};

/// Euler-Maruyama ensemble from X(0) = initial_mean to t_end. Results do not
/// depend on `threads`. Throws InvalidArgument if t_end < 10 / min(gamma) or
/// dt > max_time_step(sys), UnphysicalBath as noise_factor().
EnsembleEstimate run_ensemble(const SystemParams& sys, const NoiseModel& model,
                              const EnsembleOptions& options = {});

/// Pairwise (cascade) summation; the result depends only on the order of
/// `values`.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace cvsteady::langevin
