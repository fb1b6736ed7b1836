// Copyright 2026 The darkloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// darkloop: runs the holonomic-gate experiments from a JSON config.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "darkloop/cli/commands.hpp"
#include "darkloop/cli/config.hpp"

int main(int argc, char** argv) {
  namespace cli = darkloop::cli;

  CLI::App app{"Pulse-level simulator for holonomic gates on two dark paths"};
  app.set_version_flag("--version", cli::kVersion);
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool check = false;
  app.add_option("--config", config_path, "JSON config file (defaults apply when omitted)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
  app.add_option("--seed", seed, "Master seed (overrides seed)");
  app.add_option("--threads", threads, "Worker threads (overrides threads)")
      ->check(CLI::Range(1u, 1024u));
  app.add_flag("--check", check, "Exit 1 if any gate fidelity is below check_threshold");
  app.fallthrough();

  const std::string descriptions[] = {
      "Realize the named gates for each eta; writes gates.csv and pulse schedules",
      "Level populations during a loop, noiseless, shot-sampled and optionally noisy",
      "Process tomography of each gate, exact and finite-shot",
      "Reference and interleaved randomized benchmarking",
      "Gate fidelity versus Rabi amplitude error",
      "Controlled-phase gate on the effective spin-phonon model",
      "Blue-sideband frequency check of the spin-phonon model"};
  for (size_t k = 0; k < cli::command_names().size(); ++k) {
    app.add_subcommand(cli::command_names()[k], descriptions[k]);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    cli::ExperimentConfig cfg =
        config_path.empty() ? cli::parse_config(nlohmann::json::object()) : cli::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    const std::string name = app.get_subcommands().front()->get_name();
    return cli::run_command(name, cfg, cli::RunOptions{check}, std::cout);
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
