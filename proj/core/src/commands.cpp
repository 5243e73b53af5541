#include "cvsteady/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <fmt/format.h>
#include <json.hpp>

#include "cvsteady/analytic.hpp"
#include "cvsteady/error.hpp"
#include "cvsteady/labframe.hpp"
#include "cvsteady/langevin.hpp"

namespace cvsteady::app {

namespace {

using config::AxisName;
using config::Frame;
using config::RunConfig;
using json = nlohmann::ordered_json;

constexpr std::string_view kUnitsLine = "# units: omega=1, kB=1\n";

std::string num(double x) { return fmt::format("{:.17g}", x); }

json matrix_json(const Mat4& m) {
  json arr = json::array();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) arr.push_back(m(i, j));
  return arr;
}

json header_json(std::string_view command, const RunConfig& c) {
  json j;
  j["tool"] = "cvsteady";
  j["version"] = std::string(version());
  j["command"] = std::string(command);
  j["units"] = "omega=1, kB=1";
  j["seed"] = c.seed;
  return j;
}

json parameters_json(const RunConfig& c) {
  json p;
  p["omega1"] = c.omega1;
  p["omega2"] = c.omega2;
  p["J"] = c.J;
  p["gamma1"] = c.gamma1;
  p["gamma2"] = c.gamma2;
  p["temperature"] = c.temperature;
  for (int k : {1, 2}) {
    const config::BathConfig& b = k == 1 ? c.bath1 : c.bath2;
    const DerivedBath d = c.derived_bath(k);
    json bj;
    if (b.raw) {
      bj["raw_override"] = true;
    } else {
      const BathSpec s = c.bath_spec(k);
      bj["nbar"] = s.nbar();
      bj["r"] = s.r();
      bj["phi"] = s.phi();
    }
    bj["N"] = d.N;
    // + 0.0 turns -0 into 0 in the printed output.
    bj["M_re"] = d.M.real() + 0.0;
    bj["M_im"] = d.M.imag() + 0.0;
    p["bath" + std::to_string(k)] = bj;
  }
  return p;
}

void require_physical_baths(const RunConfig& c) {
  for (int k : {1, 2}) {
    if (!c.derived_bath(k).is_physical())
      throw UnphysicalBath("bath" + std::to_string(k) +
                           " violates |M|^2 <= N(N+1)");
  }
}

void reject_raw(const RunConfig& c, std::string_view command) {
  if (c.has_raw_override())
    throw ConfigError(c.bath1.raw ? "bath1.raw.N" : "bath2.raw.N",
                      fmt::format("raw bath overrides are not supported by '{}'",
                                  command));
}

bool phases_aligned(double phi1, double phi2) {
  // M depends on exp(2i phi), so phases matter modulo pi.
  const double d = std::remainder(phi1 - phi2, std::numbers::pi);
  return std::abs(d) <= 1e-12;
}

// Why the symmetric closed form does not apply, or empty when it does.
std::string analytic_obstacle(const RunConfig& c) {
  if (c.has_raw_override()) return "raw bath override";
  if (c.omega1 != c.omega2) return "omega1 != omega2";
  if (c.gamma1 != c.gamma2) return "gamma1 != gamma2";
  if (c.bath1.r != c.bath2.r) return "r1 != r2";
  if (c.nbar(1) != c.nbar(2)) return "nbar1 != nbar2";
  if (!phases_aligned(c.bath1.phi, c.bath2.phi)) return "phi1 != phi2 (mod pi)";
  return {};
}

struct RotatingPoint {
  Mat4 A;
  Mat4 D;
  CovarianceMatrix V;
  EntanglementResult ent;
};

RotatingPoint solve_rotating(const RunConfig& c) {
  const SystemParams sys = c.system();
  const Mat4 A = build_drift_rotating(sys);
  const Mat4 D = build_diffusion_rotating(sys, c.derived_bath(1), c.derived_bath(2));
  CovarianceMatrix V = solve_lyapunov(A, D);
  const EntanglementResult ent = log_negativity(V);
  return {A, D, std::move(V), ent};
}

labframe::LabFrameProblem lab_problem(const RunConfig& c) {
  return labframe::LabFrameProblem(c.system(), c.bath_spec(1), c.bath_spec(2),
                                   c.lab.representation);
}

std::string lab_tolerances(const RunConfig& c) {
  return fmt::format(
      "ps={};steps={};samples={};criterion={};representation={};method={}",
      num(c.lab.tolerance), c.lab.steps_per_period, c.lab.samples_per_period,
      config::to_string(c.lab.criterion), config::to_string(c.lab.representation),
      config::to_string(c.lab.method));
}

// Visits grid points in row-major order, first axis slowest.
template <class F>
void for_each_point(const RunConfig& c, F&& visit) {
  const auto& axes = c.grid.axes;
  if (axes.empty()) {
    visit(c);
    return;
  }
  const std::vector<double> first = axes[0].points();
  const std::vector<double> second =
      axes.size() > 1 ? axes[1].points() : std::vector<double>{};
  for (double a : first) {
    RunConfig ca = config::with_axis_value(c, axes[0].name, a);
    if (axes.size() == 1) {
      config::validate(ca);
      visit(ca);
      continue;
    }
    for (double b : second) {
      RunConfig cb = config::with_axis_value(ca, axes[1].name, b);
      config::validate(cb);
      visit(cb);
    }
  }
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string_view version() {
#ifdef CVSTEADY_VERSION
  return CVSTEADY_VERSION;
#else
  return "unknown";
#endif
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const NotStable*>(&e)) return kExitNotStable;
  if (dynamic_cast<const UnphysicalBath*>(&e)) return kExitUnphysicalBath;
  if (dynamic_cast<const NoConvergence*>(&e)) return kExitNoConvergence;
  if (dynamic_cast<const InvalidArgument*>(&e)) return kExitConfig;
  if (dynamic_cast<const StepTooLarge*>(&e)) return kExitConfig;
  return kExitFailure;
}

std::string cmd_steady(const RunConfig& c) {
  require_physical_baths(c);
  const RotatingPoint pt = solve_rotating(c);
  const SymplecticSpectrum spectrum = symplectic_eigenvalues(pt.V.matrix());
  const SymplecticSpectrum pt_spectrum =
      symplectic_eigenvalues(partial_transpose(pt.V.matrix()));

  json j = header_json("steady", c);
  j["frame"] = "rotating";
  j["frame_reference"] = "co-rotating at omega1; mode 2 rotates at omega2 - omega1";
  j["parameters"] = parameters_json(c);
  j["covariance"] = matrix_json(pt.V.matrix());
  j["nu_minus"] = pt.ent.nu_minus;
  j["log_negativity"] = pt.ent.log_negativity;
  j["entangled"] = pt.ent.entangled;
  j["symplectic_eigenvalues"] = {spectrum.nu_minus, spectrum.nu_plus};
  j["partial_transpose_symplectic_eigenvalues"] = {pt_spectrum.nu_minus, pt_spectrum.nu_plus};
  j["stability_margin"] = stability_margin(pt.A);
  j["lyapunov_residual"] = lyapunov_residual(pt.A, pt.V.matrix(), pt.D);
  j["physicality_margin"] = physicality_margin(pt.V.matrix());

  json an;
  const std::string obstacle = analytic_obstacle(c);
  if (obstacle.empty()) {
    const double y = 2.0 * c.nbar(1) + 1.0;
    const double nu = 0.5 * y * analytic::r_function(c.gamma1, c.J, c.bath1.r);
    an["applicable"] = true;
    an["nu_minus"] = nu;
    an["abs_difference"] = std::abs(nu - pt.ent.nu_minus);
  } else {
    an["applicable"] = false;
    an["reason"] = obstacle;
  }
  j["analytic"] = an;
  return j.dump(2) + "\n";
}

std::string cmd_sweep(const RunConfig& c) {
  reject_raw(c, "sweep");
  if (c.grid.axes.empty())
    throw ConfigError("sweep.axis1", "sweep requires at least one axis");

  std::string out(kUnitsLine);
  out +=
      "frame,r1,r2,phi1,phi2,J,T,nbar1,nbar2,gamma1,gamma2,omega1,omega2,"
      "nu_minus,E_N,entangled,E_N_mean,E_N_min,E_N_max,version,seed,tolerances\n";

  const bool explicit_nbar = c.bath1.nbar || c.bath2.nbar;
  for_each_point(c, [&](const RunConfig& p) {
    const BathSpec b1 = p.bath_spec(1);
    const BathSpec b2 = p.bath_spec(2);
    std::string row = fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},", config::to_string(p.frame),
        num(b1.r()), num(b2.r()), num(b1.phi()), num(b2.phi()), num(p.J),
        explicit_nbar ? std::string() : num(p.temperature), num(b1.nbar()),
        num(b2.nbar()), num(p.gamma1), num(p.gamma2), num(p.omega1), num(p.omega2));
    if (p.frame == Frame::Rotating) {
      const RotatingPoint pt = solve_rotating(p);
      row += fmt::format("{},{},{},,,,", num(pt.ent.nu_minus),
                         num(pt.ent.log_negativity), bool_str(pt.ent.entangled));
      row += fmt::format("{},{},lyapunov_residual<=1e-10\n", version(), p.seed);
    } else {
      const auto pss =
          labframe::find_periodic_steady_state(lab_problem(p), p.lab.floquet());
      // nu_minus, E_N and entangled refer to the stroboscopic sample at phase 0.
      const EntanglementResult& e0 = pss.samples.front().entanglement;
      row += fmt::format("{},{},{},{},{},{},", num(e0.nu_minus),
                         num(e0.log_negativity), bool_str(e0.entangled),
                         num(pss.E_N_mean), num(pss.E_N_min), num(pss.E_N_max));
      row += fmt::format("{},{},{}\n", version(), p.seed, lab_tolerances(p));
    }
    out += row;
  });
  return out;
}

std::string cmd_tc(const RunConfig& c) {
  reject_raw(c, "tc");
  if (c.bath1.nbar || c.bath2.nbar)
    throw ConfigError(c.bath1.nbar ? "bath1.nbar" : "bath2.nbar",
                      "tc scans temperature; remove the explicit occupation");
  for (std::size_t i = 0; i < c.grid.axes.size(); ++i) {
    const AxisName a = c.grid.axes[i].name;
    if (a != AxisName::R && a != AxisName::J)
      throw ConfigError("sweep.axis" + std::to_string(i + 1),
                        "tc supports the axes r and J only");
  }
  if (c.bath1.r != c.bath2.r)
    throw ConfigError("bath2.r", "tc requires equal squeezing r1 = r2");
  const bool rotating = c.frame == Frame::Rotating;
  if (rotating) {
    if (c.omega1 != c.omega2)
      throw ConfigError("system.omega2", "rotating-frame tc requires omega1 == omega2");
    if (c.gamma1 != c.gamma2)
      throw ConfigError("system.gamma2", "rotating-frame tc requires gamma1 == gamma2");
    if (!phases_aligned(c.bath1.phi, c.bath2.phi))
      throw ConfigError("bath2.phi", "rotating-frame tc requires phi1 = phi2 (mod pi)");
  }

  std::string out(kUnitsLine);
  out +=
      "frame,r,J,gamma1,gamma2,omega,phi1,phi2,T_c,entangled,nu_minus_at_T_c,"
      "criterion,version,seed,tolerances\n";

  for_each_point(c, [&](const RunConfig& p) {
    const double r = p.bath1.r;
    const BathSpec b1 = p.bath_spec(1);
    const BathSpec b2 = p.bath_spec(2);
    std::optional<double> tc;
    std::string check;
    std::string criterion;
    std::string tolerances;
    if (rotating) {
      tc = analytic::critical_temperature(p.gamma1, p.J, r, p.omega1);
      if (tc) {
        RunConfig at = p;
        at.temperature = *tc;
        check = num(solve_rotating(at).ent.nu_minus);
      }
      criterion = "analytic";
      tolerances = "arctanh_guard=1e-14";
    } else {
      labframe::TcOptions opts;
      opts.floquet = p.lab.floquet();
      opts.criterion = p.lab.criterion;
      opts.tolerance = p.tc.tolerance;
      opts.T_max = p.tc.T_max;
      tc = labframe::tc_labframe(lab_problem(p), p.J, r, opts);
      criterion = std::string(config::to_string(p.lab.criterion));
      tolerances = fmt::format("tc={};{}", num(p.tc.tolerance), lab_tolerances(p));
    }
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                       config::to_string(p.frame), num(r), num(p.J), num(p.gamma1),
                       num(p.gamma2), num(p.omega1), num(b1.phi()), num(b2.phi()),
                       tc ? num(*tc) : std::string(), bool_str(tc.has_value()),
                       check, criterion, version(), p.seed, tolerances);
  });
  return out;
}

std::string cmd_labframe(const RunConfig& c) {
  reject_raw(c, "labframe");
  if (c.omega1 != c.omega2)
    throw ConfigError("system.omega2", "labframe requires omega1 == omega2");
  const labframe::LabFrameProblem problem = lab_problem(c);
  const auto pss = labframe::find_periodic_steady_state(problem, c.lab.floquet());
  const double stat = pss.statistic(c.lab.criterion);

  json j = header_json("labframe", c);
  j["frame"] = "lab";
  j["parameters"] = parameters_json(c);
  j["representation"] = std::string(config::to_string(c.lab.representation));
  j["method"] = std::string(config::to_string(c.lab.method));
  j["period"] = problem.period();
  j["steps_per_period"] = c.lab.steps_per_period;
  j["samples_per_period"] = c.lab.samples_per_period;
  j["periods_integrated"] = pss.periods;
  j["stroboscopic_residual"] = pss.stroboscopic_residual;
  j["E_N_mean"] = pss.E_N_mean;
  j["E_N_min"] = pss.E_N_min;
  j["E_N_max"] = pss.E_N_max;
  j["criterion"] = std::string(config::to_string(c.lab.criterion));
  j["entangled"] = stat > 0.0;

  const RotatingPoint locked = solve_rotating(c);
  j["phase_locked_reference"] = {{"nu_minus", locked.ent.nu_minus},
                                 {"log_negativity", locked.ent.log_negativity}};

  json samples = json::array();
  for (const auto& s : pss.samples) {
    json sj;
    sj["phase"] = s.phase;
    sj["nu_minus"] = s.entanglement.nu_minus;
    sj["log_negativity"] = s.entanglement.log_negativity;
    sj["covariance"] = matrix_json(s.V.matrix());
    samples.push_back(sj);
  }
  j["samples"] = samples;
  return j.dump(2) + "\n";
}

std::string cmd_oracle(const RunConfig& c) {
  if (c.frame != Frame::Rotating)
    throw ConfigError("frame", "oracle supports the rotating frame only");
  require_physical_baths(c);

  const SystemParams sys = c.system();
  langevin::NoiseModel model{c.derived_bath(1), c.derived_bath(2), c.seed, c.oracle.dt};
  langevin::EnsembleOptions opts;
  opts.n_traj = c.oracle.n_traj;
  opts.t_end = c.oracle.t_end;
  opts.threads = c.oracle.threads;
  const auto est = langevin::run_ensemble(sys, model, opts);
  const RotatingPoint pt = solve_rotating(c);

  Mat4 z = Mat4::Zero();
  json within = json::array();
  int pass = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double diff = est.V_hat(i, j) - pt.V(i, j);
      const double se = est.standard_error(i, j);
      z(i, j) = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : INFINITY);
      const bool ok = std::abs(z(i, j)) <= 3.0;
      within.push_back(ok);
      pass += ok ? 1 : 0;
    }
  }
  const double fraction = pass / 16.0;

  json j = header_json("oracle", c);
  j["frame"] = "rotating";
  j["parameters"] = parameters_json(c);
  j["rng"] = est.rng;
  j["n_traj"] = est.n_traj;
  j["dt"] = est.dt;
  j["t_end"] = est.t_end;
  j["steps"] = est.steps;
  j["V_hat"] = matrix_json(est.V_hat);
  j["standard_error"] = matrix_json(est.standard_error);
  j["V_lyapunov"] = matrix_json(pt.V.matrix());
  j["z_scores"] = matrix_json(z);
  j["within_3_sigma"] = within;
  j["fraction_within_3_sigma"] = fraction;
  j["verdict"] = fraction >= 0.95 ? "pass" : "fail";
  return j.dump(2) + "\n";
}

std::string run(config::Mode mode, const RunConfig& c) {
  switch (mode) {
    case config::Mode::Steady: return cmd_steady(c);
    case config::Mode::Sweep: return cmd_sweep(c);
    case config::Mode::Tc: return cmd_tc(c);
    case config::Mode::Labframe: return cmd_labframe(c);
    case config::Mode::Oracle: return cmd_oracle(c);
  }
  throw InvalidArgument("unknown mode");
}

void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move output into place at '" + path + "'");
  }
}

}  // namespace cvsteady::app
