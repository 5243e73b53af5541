#pragma once

// Closed-form results for the symmetric resonant configuration: equal
// frequencies, equal decay rates, equal squeezing strengths, and squeezing
// phases aligned so that phi1 = phi2 (mod pi). Units: k_B = 1, temperatures
// in units of omega.

#include <optional>

namespace cvsteady::analytic {

struct SymmetricCase {
  double omega = 1.0;
  double gamma = 0.5;
  double J = 0.0;
  double r = 0.0;
  double T = 0.0;

  /// Throws InvalidArgument on gamma, omega <= 0 or negative J, r, T.
  void validate() const;
};

struct Intermediates {
  double K = 1.0;    // cosh(2r)
  double S = 0.0;    // sinh(2r)
  double chi = 0.0;  // 2 gamma J / (gamma^2 + 4 J^2)
  double mu = 1.0;   // gamma^2 / (gamma^2 + 4 J^2)
  double y = 1.0;    // 2 nbar + 1
};

Intermediates intermediates(double gamma, double J, double r, double y);

/// y = 2 nbar + 1 = coth(omega / 2T), exactly 1 at T = 0.
double thermal_y(double omega, double T);

/// R(r, J) = sqrt(K^2 - mu^2 S^2) - chi S. Entanglement iff y R < 1.
double r_function(double gamma, double J, double r);

/// Smallest symplectic eigenvalue of the partially transposed steady state,
/// y R / 2.
double nu_minus_analytic(const SymmetricCase& c);

/// T_c = omega / (2 artanh R); std::nullopt when R >= 1, i.e. separable at
/// every temperature including T = 0.
std::optional<double> critical_temperature(double gamma, double J, double r,
                                           double omega);

struct OptimalSqueezing {
  double r_star = 0.0;
  double R_star = 1.0;
  /// False when the stationarity closed form did not apply and the
  /// minimizer came from golden-section search.
  bool closed_form = true;
};

/// Minimizer of R(r, J) over r >= 0 for J > 0, from
/// sinh^2(2r*) = chi^2 / [(1 - mu^2)(1 - mu^2 - chi^2)].
OptimalSqueezing optimal_squeezing(double gamma, double J);

struct EntangledWindow {
  double r_low = 0.0;
  double r_high = 0.0;
};

/// Interval of r on which y R(r, J) < 1, or std::nullopt when it is empty.
/// At y = 1 the lower end is r = 0 itself, where y R = 1 exactly.
std::optional<EntangledWindow> entanglement_boundary(double gamma, double J,
                                                     double y);

}  // namespace cvsteady::analytic
