#pragma once

// Laboratory-frame phase reference: the anomalous bath correlation is fixed
// relative to the laboratory quadratures instead of co-rotating with the
// oscillators. In the rotating frame this makes M_k(t) = M_k exp(2i omega t),
// and the covariance settles onto a periodic orbit of period pi/omega.

#include <optional>
#include <vector>

#include "cvsteady/gaussian.hpp"

namespace cvsteady::labframe {

/// Two equivalent descriptions of the same dynamics.
enum class Representation {
  /// Rotating-frame drift with time-dependent diffusion built from M_k(t).
  RotatingWithTimeDependentM,
  /// Laboratory quadratures: drift includes the free rotation at omega and
  /// the diffusion is constant.
  LabQuadratures,
};

/// How find_periodic_steady_state reaches the periodic orbit.
enum class Method {
  /// Integrate from the initial state until the stroboscopic map contracts.
  Relaxation,
  /// Solve for the fixed point of the discrete one-period map directly.
  FixedPoint,
};

/// Which period statistic of E_N decides entanglement for T_c.
enum class Criterion { Mean, Min, Max };

class LabFrameProblem {
 public:
  /// Throws InvalidArgument unless sys is resonant (omega1 == omega2).
  LabFrameProblem(SystemParams sys, BathSpec bath1, BathSpec bath2,
                  Representation representation =
                      Representation::RotatingWithTimeDependentM);

  const SystemParams& system() const noexcept { return sys_; }
  const BathSpec& bath1() const noexcept { return bath1_; }
  const BathSpec& bath2() const noexcept { return bath2_; }
  const DerivedBath& derived1() const noexcept { return derived1_; }
  const DerivedBath& derived2() const noexcept { return derived2_; }
  Representation representation() const noexcept { return representation_; }

  double omega() const noexcept { return sys_.omega1(); }
  /// pi / omega: the anomalous terms oscillate at 2 omega.
  double period() const noexcept;

 private:
  SystemParams sys_;
  BathSpec bath1_;
  BathSpec bath2_;
  DerivedBath derived1_;
  DerivedBath derived2_;
  Representation representation_;
};

struct Generators {
  Mat4 A;
  Mat4 D;
};

/// Drift and diffusion at time t. Both representations agree at t = 0,
/// where the rotating and laboratory frames coincide.
Generators build_time_dependent_generators(const LabFrameProblem& p, double t);

/// Classical fourth-order Runge-Kutta for dV/dt = A V + V A^T + D(t) from
/// t0 to t1, symmetrizing after every step. The step actually used is
/// (t1 - t0) / ceil((t1 - t0) / dt). Throws StepTooLarge if dt exceeds
/// period() / 200.
CovarianceMatrix propagate_covariance(const LabFrameProblem& p,
                                      const CovarianceMatrix& V0, double t0,
                                      double t1, double dt);

struct FloquetOptions {
  int steps_per_period = 256;    // >= 200
  int samples_per_period = 64;   // >= 64, divides steps_per_period
  double tolerance = 1e-9;       // stroboscopic residual
  int max_periods = 10000;
  Method method = Method::Relaxation;
};

struct PeriodicSample {
  double phase;  // time within the period, in [0, period)
  CovarianceMatrix V;
  EntanglementResult entanglement;
};

struct PeriodicSteadyState {
  std::vector<PeriodicSample> samples;
  double E_N_mean = 0.0;
  double E_N_min = 0.0;
  double E_N_max = 0.0;
  /// max |V(t + T_p) - V(t)| over the final recorded period.
  double stroboscopic_residual = 0.0;
  /// Periods integrated before sampling (0 for the fixed-point method).
  int periods = 0;

  double statistic(Criterion c) const;
};

/// Periodic steady state reached from V0 (vacuum by default). Throws
/// NoConvergence when max_periods is exhausted.
PeriodicSteadyState find_periodic_steady_state(
    const LabFrameProblem& p, const FloquetOptions& options = {},
    const CovarianceMatrix& V0 = CovarianceMatrix::vacuum());

struct TcOptions {
  FloquetOptions floquet;
  Criterion criterion = Criterion::Mean;
  double tolerance = 1e-4;  // in T
  double T_max = 100.0;
};

/// Laboratory-frame critical temperature for coupling J and common squeezing
/// r. Frequencies, rates, phases and representation come from `templ`; the
/// baths of `templ` are replaced by thermal occupation n(omega, T) with
/// squeezing r. std::nullopt when the criterion fails already at T = 0.
std::optional<double> tc_labframe(const LabFrameProblem& templ, double J,
                                  double r, const TcOptions& options = {});

}  // namespace cvsteady::labframe
