#pragma once

// Run configuration for the command-line front end.
//
// The file format is flat UTF-8 text, one `key = value` per line, with `#`
// starting a comment. Keys are dotted (`bath1.r = 0.3`). Every key is
// optional; unspecified physical parameters default to omega = 1,
// gamma = 0.5, J = 0.7, r = 0, phi = 0, T = 0. See README.md for the full
// schema.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cvsteady/gaussian.hpp"
#include "cvsteady/labframe.hpp"

namespace cvsteady::config {

enum class Mode { Steady, Sweep, Tc, Labframe, Oracle };
enum class Frame { Rotating, Lab };

std::string_view to_string(Mode m);
std::string_view to_string(Frame f);
std::string_view to_string(labframe::Representation r);
std::string_view to_string(labframe::Criterion c);
std::string_view to_string(labframe::Method m);
std::optional<Mode> parse_mode(std::string_view s);

/// Names a sweep axis may take. `r` sets r1 = r2.
enum class AxisName { R, R1, R2, Phi1, Phi2, J, T };
std::string_view to_string(AxisName a);

struct Axis {
  AxisName name = AxisName::R;
  /// Linear grid min..max with `count` points, or an explicit list.
  double min = 0.0;
  double max = 1.0;
  int count = 2;
  std::vector<double> values;  // when non-empty, overrides min/max/count

  std::vector<double> points() const;
};

struct SweepGrid {
  std::vector<Axis> axes;  // at most two; first axis varies slowest
  std::size_t size() const;
};

struct BathConfig {
  std::optional<double> nbar;  // overrides the temperature-derived value
  double r = 0.0;
  double phi = 0.0;
  /// Raw (N, M) override bypassing the (nbar, r, phi) parametrization.
  std::optional<DerivedBath> raw;
};

struct LabConfig {
  labframe::Representation representation =
      labframe::Representation::RotatingWithTimeDependentM;
  labframe::Method method = labframe::Method::Relaxation;
  labframe::Criterion criterion = labframe::Criterion::Mean;
  int steps_per_period = 256;
  int samples_per_period = 64;
  double tolerance = 1e-9;
  int max_periods = 10000;

  labframe::FloquetOptions floquet() const;
};

struct TcConfig {
  double tolerance = 1e-4;
  double T_max = 100.0;
};

struct OracleConfig {
  std::size_t n_traj = 100000;
  double t_end = 0.0;  // 0: 10 / min(gamma)
  double dt = 0.0;     // 0: default step
  unsigned threads = 1;
};

struct RunConfig {
  double omega1 = 1.0;
  double omega2 = 1.0;
  double J = 0.7;
  double gamma1 = 0.5;
  double gamma2 = 0.5;
  double temperature = 0.0;
  BathConfig bath1;
  BathConfig bath2;
  Frame frame = Frame::Rotating;
  std::uint64_t seed = 0;
  SweepGrid grid;
  LabConfig lab;
  TcConfig tc;
  OracleConfig oracle;

  SystemParams system() const;
  /// Thermal occupation of bath k (1 or 2) at the configured temperature,
  /// unless overridden by bathk.nbar.
  double nbar(int k) const;
  BathSpec bath_spec(int k) const;
  /// Raw override if present, otherwise derived from bath_spec(k).
  DerivedBath derived_bath(int k) const;
  bool has_raw_override() const { return bath1.raw || bath2.raw; }
};

/// Parses the key-value text. Throws ConfigError naming the line and field
/// for unknown keys, duplicates, malformed numbers and parameter values that
/// violate the physical invariants.
RunConfig parse(std::string_view text);

RunConfig load(const std::string& path);

/// Canonical text form: every key, fixed order, doubles with 17 significant
/// digits. parse(serialize(c)) serializes back to the same text.
std::string serialize(const RunConfig& c);

/// Re-checks the invariants of an assembled config (parse() calls this).
void validate(const RunConfig& c);

/// Applies one sweep-axis value to a copy of the config.
RunConfig with_axis_value(const RunConfig& c, AxisName axis, double value);

}  // namespace cvsteady::config
