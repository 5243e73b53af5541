// cvsteady: steady-state entanglement of two coupled oscillators with
// squeezed reservoirs.
//
//   cvsteady steady|sweep|tc|labframe|oracle --config <path> [--out <path>] [--seed <u64>]
//
// Exit codes: 0 success, 2 config error, 3 instability, 4 unphysical bath,
// 5 no convergence.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cvsteady/commands.hpp"
#include "cvsteady/config.hpp"
#include "cvsteady/error.hpp"

namespace {

struct Invocation {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
};

}  // namespace

int main(int argc, char** argv) {
  using cvsteady::config::Mode;

  CLI::App app{"Steady-state entanglement of coupled oscillators with squeezed reservoirs"};
  app.set_version_flag("--version", std::string(cvsteady::app::version()));
  app.require_subcommand(1);

  Invocation inv;
  const std::pair<Mode, const char*> commands[] = {
      {Mode::Steady, "single rotating-frame steady state (JSON)"},
      {Mode::Sweep, "parameter sweep over up to two axes (CSV)"},
      {Mode::Tc, "critical temperature per (r, J) point (CSV)"},
      {Mode::Labframe, "laboratory-frame periodic steady state (JSON)"},
      {Mode::Oracle, "Monte Carlo Langevin check of the steady state (JSON)"},
  };
  for (const auto& [mode, help] : commands) {
    CLI::App* sub = app.add_subcommand(std::string(cvsteady::config::to_string(mode)), help);
    sub->add_option("--config", inv.config_path, "configuration file (key = value)")
        ->required();
    sub->add_option("--out", inv.out_path, "output file (default: standard output)");
    sub->add_option("--seed", inv.seed, "random seed; overrides the config value");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cvsteady::app::kExitConfig;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const Mode mode = *cvsteady::config::parse_mode(chosen->get_name());

  try {
    cvsteady::config::RunConfig config = cvsteady::config::load(inv.config_path);
    if (inv.seed) config.seed = *inv.seed;
    const std::string output = cvsteady::app::run(mode, config);
    if (inv.out_path.empty()) {
      std::cout << output;
      std::cout.flush();
    } else {
      cvsteady::app::write_atomically(inv.out_path, output);
    }
  } catch (const std::exception& e) {
    std::cerr << "cvsteady " << chosen->get_name() << ": error: " << e.what() << "\n";
    return cvsteady::app::exit_code_for(e);
  }
  return cvsteady::app::kExitOk;
}
