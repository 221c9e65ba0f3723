// SPDX-License-Identifier: Apache-2.0
// Command-line front end: rates, sweep and simulate.
#include <iostream>

#include "CLI11.hpp"
#include "latrelay/harness.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::string> out;
  std::optional<unsigned> workers;
  bool no_timing = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration")->required();
  cmd->add_option("--out", o.out, "record output path (default: stdout)");
  cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--no-timing", o.no_timing, "omit the execution section");
}

int fail(const latrelay::RunError& e) {
  std::cout << e.to_json().dump(2) << "\n";
  return e.kind() == "domain" ? 3 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nested lattice coding for Gaussian relay networks"};
  app.require_subcommand(1);
  Overrides o;
  CLI::App* rates = app.add_subcommand("rates", "evaluate rate formulas");
  add_common(rates, o);
  rates->add_option("--seed", o.seed, "master seed");
  CLI::App* sweep = app.add_subcommand("sweep", "rate-region sweep to CSV");
  add_common(sweep, o);
  CLI::App* sim = app.add_subcommand("simulate", "Monte-Carlo simulation");
  add_common(sim, o);
  sim->add_option("--seed", o.seed, "master seed");
  sim->add_option("--trials", o.trials, "trial count");
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    latrelay::RunConfig c = latrelay::load_config(o.config);
    if (c.command != command)
      throw latrelay::RunError("validation", "command",
                               "command: config says '" + c.command + "' but '" + command + "' was invoked");
    if (o.seed) c.seed = c.sim.seed = *o.seed;
    if (o.trials) {
      if (*o.trials < 1) throw latrelay::RunError("validation", "trials", "trials: must be >= 1");
      c.sim.trials = *o.trials;
    }
    if (o.workers) c.sim.workers = *o.workers;
    if (o.out) c.output.path = *o.out;
    if (o.no_timing) c.output.include_timing = false;

    const latrelay::Json record = latrelay::run(c);
    if (latrelay::record_path(c).empty()) {
      std::cout << latrelay::record_text(record);
    } else {
      latrelay::write_record(c, record);
      std::cerr << "wrote " << latrelay::record_path(c) << "\n";
    }
  } catch (const latrelay::RunError& e) {
    return fail(e);
  } catch (const std::exception& e) {
    return fail(latrelay::RunError("internal", "", e.what()));
  }
  return 0;
}
