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

#ifndef DARKLOOP_CLI_COMMANDS_HPP_
#define DARKLOOP_CLI_COMMANDS_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "darkloop/cli/config.hpp"

namespace darkloop::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  bool check = false;  // nonzero exit when a gate misses cfg.check_threshold
};

/// Subcommand names in canonical order.
const std::vector<std::string>& command_names();

/// Runs one subcommand, writing its data files plus resolved_config.json and
/// manifest.json into cfg.output_dir. Progress goes to `log`. Returns the
/// process exit code.
int run_command(const std::string& name, const ExperimentConfig& cfg, const RunOptions& opts,
                std::ostream& log);

}  // namespace darkloop::cli

#endif  // DARKLOOP_CLI_COMMANDS_HPP_
