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

#ifndef DARKLOOP_CLI_CONFIG_HPP_
#define DARKLOOP_CLI_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "darkloop/pulse.hpp"
#include "darkloop/robustness.hpp"

namespace darkloop::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DriveConfig {
  double peak_rabi = 2.0 * 3.14159265358979323846 * 1e4;  // rad/s
  PeakNorm norm = PeakNorm::kComposite;
  int samples = kDefaultSamples;
  double tol = 1e-9;
};

struct NoiseConfig {
  bool enabled = false;
  double t2 = 25e-3;               // s
  double depolarizing_rate = 0.0;  // 1/s
  double lindblad_tol = 1e-8;
};

struct PopulationsConfig {
  std::vector<std::string> gates = {"X", "H"};
  int points = 200;
  bool sampled = true;
};

struct QptConfig {
  double eta = 4.0;
  int seeds = 20;
};

struct RbConfig {
  double eta = 4.0;
  std::vector<int> lengths = {1, 2, 4, 8, 16, 32};
  int sequences = 20;
  std::vector<std::string> interleaved = {"X", "H", "T", "S"};
  std::string implementation = "simulated";  // or "ideal"
  double depolarizing = 0.0;                 // extra per-gate depolarizing probability
  int shots = 0;                             // 0: exact survival probabilities
};

struct SweepSection {
  std::vector<double> epsilons = default_epsilon_grid();
};

struct CzConfig {
  double gamma = 3.14159265358979323846;
  double eta = 4.0;
  double lamb_dicke = 0.1;
  double trap_frequency = 2.0 * 3.14159265358979323846 * 2.4e6;  // rad/s
  double sideband_rabi_fraction = 0.05;  // Ω0 / ν for the sideband check
};

struct ExperimentConfig {
  std::vector<std::string> gates = {"X", "H", "T", "S"};
  std::vector<double> etas = {0.0, 4.0};
  DriveConfig drive;
  NoiseConfig noise;
  int shots = 2000;
  double readout_error = 0.0;  // symmetric flip probability for sampled readout
  std::uint64_t seed = 20200101;
  unsigned threads = 1;
  double check_threshold = 0.999999;
  std::filesystem::path output_dir = "out";
  PopulationsConfig populations;
  QptConfig qpt;
  RbConfig rb;
  SweepSection sweep;
  CzConfig cz;
};

/// Parses and validates; unknown keys and out-of-range values throw ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every field, defaults included.
nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace darkloop::cli

#endif  // DARKLOOP_CLI_CONFIG_HPP_
