#include "cvsteady/labframe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/LU>

#include "cvsteady/error.hpp"
#include "cvsteady/numerics.hpp"

namespace cvsteady::labframe {

namespace {

constexpr int kMinStepsPerPeriod = 200;
constexpr int kMinSamplesPerPeriod = 64;

Mat4 lab_drift(const SystemParams& sys) {
  Mat4 A = build_drift_rotating(sys);
  const double w = sys.omega1();
  A(0, 1) += w;
  A(1, 0) -= w;
  A(2, 3) += w;
  A(3, 2) -= w;
  return A;
}

// Diffusion with both anomalous correlations advanced by exp(i angle).
Mat4 rotated_diffusion(const LabFrameProblem& p, double angle) {
  const std::complex<double> phase = std::polar(1.0, angle);
  DerivedBath b1 = p.derived1();
  DerivedBath b2 = p.derived2();
  b1.M *= phase;
  b2.M *= phase;
  return build_diffusion_rotating(p.system(), b1, b2);
}

Mat4 rhs(const Mat4& A, const Mat4& V, const Mat4& D) {
  return A * V + V * A.transpose() + D;
}

Mat4 rk4_step(const Mat4& A, const Mat4& V, double h, const Mat4& D0,
              const Mat4& Dhalf, const Mat4& D1) {
  const Mat4 k1 = rhs(A, V, D0);
  const Mat4 k2 = rhs(A, V + 0.5 * h * k1, Dhalf);
  const Mat4 k3 = rhs(A, V + 0.5 * h * k2, Dhalf);
  const Mat4 k4 = rhs(A, V + h * k3, D1);
  Mat4 next = V + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return 0.5 * (next + next.transpose());
}

// One-period RK4 propagator with the diffusion tabulated on the half-step
// grid, so successive periods see bitwise-identical coefficients.
class PeriodPropagator {
 public:
  PeriodPropagator(const LabFrameProblem& p, int steps)
      : steps_(steps), h_(p.period() / steps) {
    const Generators g0 = build_time_dependent_generators(p, 0.0);
    A_ = g0.A;
    diffusion_.reserve(2 * steps + 1);
    for (int i = 0; i <= 2 * steps; ++i) {
      diffusion_.push_back(
          build_time_dependent_generators(p, 0.5 * h_ * i).D);
    }
    // Exact periodicity of the table.
    diffusion_.back() = diffusion_.front();
  }

  int steps() const noexcept { return steps_; }
  double step() const noexcept { return h_; }

  Mat4 advance(const Mat4& V, int k, bool with_noise) const {
    if (!with_noise) {
      const Mat4 zero = Mat4::Zero();
      return rk4_step(A_, V, h_, zero, zero, zero);
    }
    return rk4_step(A_, V, h_, diffusion_[2 * k], diffusion_[2 * k + 1],
                    diffusion_[2 * k + 2]);
  }

  Mat4 period(Mat4 V, bool with_noise = true) const {
    for (int k = 0; k < steps_; ++k) V = advance(V, k, with_noise);
    return V;
  }

 private:
  int steps_;
  double h_;
  Mat4 A_;
  std::vector<Mat4> diffusion_;
};

void check_options(const FloquetOptions& o, double period) {
  if (o.steps_per_period < kMinStepsPerPeriod)
    throw StepTooLarge("steps_per_period must be >= 200 (dt <= T_p/200), got " +
                       std::to_string(o.steps_per_period) + " (T_p = " +
                       std::to_string(period) + ")");
  if (o.samples_per_period < kMinSamplesPerPeriod)
    throw InvalidArgument("samples_per_period must be >= 64");
  if (o.steps_per_period % o.samples_per_period != 0)
    throw InvalidArgument("samples_per_period must divide steps_per_period");
  if (!(o.tolerance > 0.0)) throw InvalidArgument("tolerance must be > 0");
  if (o.max_periods < 1) throw InvalidArgument("max_periods must be >= 1");
}

Mat4 fixed_point(const PeriodPropagator& prop) {
  // vec(V_next) = M vec(V) + q with q the image of V = 0.
  Eigen::Matrix<double, 16, 16> M;
  for (int idx = 0; idx < 16; ++idx) {
    Mat4 basis = Mat4::Zero();
    basis(idx % 4, idx / 4) = 1.0;
    M.col(idx) = prop.period(basis, /*with_noise=*/false).reshaped();
  }
  const Eigen::Matrix<double, 16, 1> q = prop.period(Mat4::Zero()).reshaped();
  const Eigen::Matrix<double, 16, 16> I =
      Eigen::Matrix<double, 16, 16>::Identity();
  const Eigen::Matrix<double, 16, 1> v = (I - M).partialPivLu().solve(q);
  Mat4 V = v.reshaped(4, 4);
  return 0.5 * (V + V.transpose());
}

}  // namespace

LabFrameProblem::LabFrameProblem(SystemParams sys, BathSpec bath1, BathSpec bath2,
                                 Representation representation)
    : sys_(sys),
      bath1_(bath1),
      bath2_(bath2),
      derived1_(derive_bath_params(bath1)),
      derived2_(derive_bath_params(bath2)),
      representation_(representation) {
  if (!sys.resonant())
    throw InvalidArgument(
        "laboratory-frame problem requires omega1 == omega2 (the nonresonant "
        "case is quasi-periodic)");
}

double LabFrameProblem::period() const noexcept {
  return std::numbers::pi / omega();
}

Generators build_time_dependent_generators(const LabFrameProblem& p, double t) {
  Generators g;
  switch (p.representation()) {
    case Representation::RotatingWithTimeDependentM:
      g.A = build_drift_rotating(p.system());
      g.D = rotated_diffusion(p, 2.0 * p.omega() * t);
      break;
    case Representation::LabQuadratures:
      g.A = lab_drift(p.system());
      g.D = build_diffusion_rotating(p.system(), p.derived1(), p.derived2());
      break;
  }
  return g;
}

CovarianceMatrix propagate_covariance(const LabFrameProblem& p,
                                      const CovarianceMatrix& V0, double t0,
                                      double t1, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  const double floor_dt = p.period() / kMinStepsPerPeriod;
  if (dt > floor_dt * (1.0 + 1e-12))
    throw StepTooLarge("dt = " + std::to_string(dt) + " exceeds T_p/200 = " +
                       std::to_string(floor_dt));
  if (t1 < t0) throw InvalidArgument("t1 must be >= t0");
  if (t1 == t0) return V0;

  const auto n = static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9));
  const double h = (t1 - t0) / static_cast<double>(n);
  Mat4 V = V0.matrix();
  for (long k = 0; k < n; ++k) {
    const double t = t0 + h * static_cast<double>(k);
    const Generators g0 = build_time_dependent_generators(p, t);
    const Mat4 Dhalf = build_time_dependent_generators(p, t + 0.5 * h).D;
    const Mat4 D1 = build_time_dependent_generators(p, t + h).D;
    V = rk4_step(g0.A, V, h, g0.D, Dhalf, D1);
  }
  return CovarianceMatrix(V);
}

double PeriodicSteadyState::statistic(Criterion c) const {
  switch (c) {
    case Criterion::Mean:
      return E_N_mean;
    case Criterion::Min:
      return E_N_min;
    case Criterion::Max:
      return E_N_max;
  }
  return E_N_mean;
}

PeriodicSteadyState find_periodic_steady_state(const LabFrameProblem& p,
                                               const FloquetOptions& options,
                                               const CovarianceMatrix& V0) {
  check_options(options, p.period());
  const PeriodPropagator prop(p, options.steps_per_period);

  PeriodicSteadyState out;
  Mat4 V = V0.matrix();
  if (options.method == Method::FixedPoint) {
    V = fixed_point(prop);
  } else {
    for (;;) {
      const Mat4 next = prop.period(V);
      ++out.periods;
      const double residual = (next - V).cwiseAbs().maxCoeff();
      V = next;
      if (residual <= options.tolerance) break;
      if (out.periods >= options.max_periods)
        throw NoConvergence("stroboscopic map did not converge within " +
                            std::to_string(options.max_periods) +
                            " periods (residual " + std::to_string(residual) +
                            ")");
    }
  }

  // Record one more period.
  const int stride = options.steps_per_period / options.samples_per_period;
  const Mat4 start = V;
  out.samples.reserve(options.samples_per_period);
  for (int k = 0; k < prop.steps(); ++k) {
    if (k % stride == 0) {
      CovarianceMatrix cov(V);
      const EntanglementResult ent = log_negativity(cov);
      out.samples.push_back({prop.step() * k, std::move(cov), ent});
    }
    V = prop.advance(V, k, true);
  }
  out.stroboscopic_residual = (V - start).cwiseAbs().maxCoeff();

  double sum = 0.0;
  out.E_N_min = out.samples.front().entanglement.log_negativity;
  out.E_N_max = out.E_N_min;
  for (const auto& s : out.samples) {
    const double e = s.entanglement.log_negativity;
    sum += e;
    out.E_N_min = std::min(out.E_N_min, e);
    out.E_N_max = std::max(out.E_N_max, e);
  }
  out.E_N_mean = sum / static_cast<double>(out.samples.size());
  // Keep the ordering min <= mean <= max exact under rounding of the sum.
  out.E_N_mean = std::clamp(out.E_N_mean, out.E_N_min, out.E_N_max);
  return out;
}

std::optional<double> tc_labframe(const LabFrameProblem& templ, double J,
                                  double r, const TcOptions& options) {
  if (!(options.tolerance > 0.0)) throw InvalidArgument("tolerance must be > 0");
  const SystemParams& base = templ.system();
  const SystemParams sys(base.omega1(), base.omega2(), J, base.gamma1(),
                         base.gamma2());

  auto criterion = [&](double T) {
    const double nbar = thermal_occupation(templ.omega(), T);
    const LabFrameProblem q(sys, BathSpec(nbar, r, templ.bath1().phi()),
                            BathSpec(nbar, r, templ.bath2().phi()),
                            templ.representation());
    return find_periodic_steady_state(q, options.floquet)
        .statistic(options.criterion);
  };

  double previous = criterion(0.0);
  if (!(previous > 0.0)) return std::nullopt;

  double lo = 0.0;
  double hi = 1.0 / 16.0;
  for (;;) {
    const double value = criterion(hi);
    if (value > previous + 1e-12)
      throw NoConvergence("entanglement criterion is not monotone in T near T = " +
                          std::to_string(hi));
    if (!(value > 0.0)) break;
    previous = value;
    lo = hi;
    hi *= 2.0;
    if (hi > options.T_max)
      throw NoConvergence("entanglement persists beyond T_max = " +
                          std::to_string(options.T_max));
  }
  return numerics::bisect(
      [&](double T) { return criterion(T) > 0.0 ? -1.0 : 1.0; }, lo, hi,
      options.tolerance);
}

}  // namespace cvsteady::labframe
