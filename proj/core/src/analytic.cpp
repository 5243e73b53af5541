#include "cvsteady/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "cvsteady/error.hpp"
#include "cvsteady/numerics.hpp"

namespace cvsteady::analytic {

namespace {

constexpr double kRootTol = 1e-13;
// R values this close to 1 are treated as the threshold itself.
constexpr double kArctanhGuard = 1e-14;

void check_rates(double gamma, double J) {
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be > 0");
  if (!(J >= 0.0)) throw InvalidArgument("J must be >= 0");
}

}  // namespace

void SymmetricCase::validate() const {
  if (!(omega > 0.0)) throw InvalidArgument("omega must be > 0");
  check_rates(gamma, J);
  if (!(r >= 0.0)) throw InvalidArgument("r must be >= 0");
  if (!(T >= 0.0)) throw InvalidArgument("T must be >= 0");
}

Intermediates intermediates(double gamma, double J, double r, double y) {
  check_rates(gamma, J);
  const double denom = gamma * gamma + 4.0 * J * J;
  Intermediates out;
  out.K = std::cosh(2.0 * r);
  out.S = std::sinh(2.0 * r);
  out.chi = 2.0 * gamma * J / denom;
  out.mu = gamma * gamma / denom;
  out.y = y;
  return out;
}

double thermal_y(double omega, double T) {
  if (!(omega > 0.0)) throw InvalidArgument("omega must be > 0");
  if (!(T >= 0.0)) throw InvalidArgument("T must be >= 0");
  if (T == 0.0) return 1.0;
  // coth(x/2) = 1 + 2/(e^x - 1); expm1 -> inf gives exactly 1.
  return 1.0 + 2.0 / std::expm1(omega / T);
}

double r_function(double gamma, double J, double r) {
  if (!(r >= 0.0)) throw InvalidArgument("r must be >= 0");
  const Intermediates in = intermediates(gamma, J, r, 1.0);
  // K^2 - mu^2 S^2 written as 1 + (1 - mu^2) S^2 so R(0) = R(r, J=0) = 1
  // hold exactly.
  const double radicand = 1.0 + (1.0 - in.mu * in.mu) * in.S * in.S;
  return std::sqrt(radicand) - in.chi * in.S;
}

double nu_minus_analytic(const SymmetricCase& c) {
  c.validate();
  return 0.5 * thermal_y(c.omega, c.T) * r_function(c.gamma, c.J, c.r);
}

std::optional<double> critical_temperature(double gamma, double J, double r,
                                           double omega) {
  if (!(omega > 0.0)) throw InvalidArgument("omega must be > 0");
  const double R = r_function(gamma, J, r);
  if (R >= 1.0 - kArctanhGuard) return std::nullopt;
  const double artanh = 0.5 * std::log((1.0 + R) / (1.0 - R));
  return omega / (2.0 * artanh);
}

OptimalSqueezing optimal_squeezing(double gamma, double J) {
  check_rates(gamma, J);
  if (!(J > 0.0)) throw InvalidArgument("optimal squeezing requires J > 0");
  const Intermediates in = intermediates(gamma, J, 0.0, 1.0);
  const double a = 1.0 - in.mu * in.mu;
  const double gap = a - in.chi * in.chi;
  OptimalSqueezing out;
  if (gap > 0.0) {
    const double s2 = in.chi * in.chi / (a * gap);
    out.r_star = 0.5 * std::asinh(std::sqrt(s2));
    out.R_star = r_function(gamma, J, out.r_star);
    out.closed_form = true;
    return out;
  }
  // R grows without bound for large r; search a bracket that contains the
  // minimum before refining.
  double hi = 1.0;
  while (r_function(gamma, J, hi) < r_function(gamma, J, 0.5 * hi) && hi < 64.0)
    hi *= 2.0;
  const auto [x, fx] = numerics::golden_section_minimize(
      [&](double r) { return r_function(gamma, J, r); }, 0.0, hi, 1e-12);
  out.r_star = x;
  out.R_star = fx;
  out.closed_form = false;
  return out;
}

std::optional<EntangledWindow> entanglement_boundary(double gamma, double J,
                                                     double y) {
  check_rates(gamma, J);
  if (!(y >= 1.0)) throw InvalidArgument("y must be >= 1");
  if (J == 0.0) return std::nullopt;
  const OptimalSqueezing opt = optimal_squeezing(gamma, J);
  if (y * opt.R_star >= 1.0) return std::nullopt;

  auto excess = [&](double r) { return y * r_function(gamma, J, r) - 1.0; };

  EntangledWindow window;
  window.r_low = excess(0.0) <= 0.0
                     ? 0.0
                     : numerics::bisect(excess, 0.0, opt.r_star, kRootTol);

  double hi = std::max(2.0 * opt.r_star, 0.5);
  while (excess(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e3) throw NoConvergence("entangled window upper edge not bracketed");
  }
  window.r_high = numerics::bisect(excess, opt.r_star, hi, kRootTol);
  return window;
}

}  // namespace cvsteady::analytic
