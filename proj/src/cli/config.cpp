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

#include "darkloop/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "darkloop/gates.hpp"

namespace darkloop::cli {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(fmt::format("{}: expected an object", where));
}

void reject_unknown(const json& j, const std::string& where, std::set<std::string> allowed) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
  }
}

template <class T>
void read(const json& j, const char* key, const std::string& where, T& out) {
  if (!j.contains(key)) return;
  try {
    const json& v = j.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("expected a boolean");
    } else if constexpr (std::is_arithmetic_v<T>) {
      if (!v.is_number()) throw ConfigError("expected a number");
    }
    out = v.get<T>();
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("{}.{}: {}", where, key, e.what()));
  }
}

void check(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void check_gates(const std::vector<std::string>& gates, const std::string& where) {
  check(!gates.empty(), where + ": gate list is empty");
  for (const auto& g : gates) {
    try {
      named_gate_angles(g);
    } catch (const std::invalid_argument&) {
      throw ConfigError(fmt::format("{}: unknown gate '{}'", where, g));
    }
  }
}

PeakNorm parse_norm(const std::string& s) {
  if (s == "composite") return PeakNorm::kComposite;
  if (s == "per_tone") return PeakNorm::kPerTone;
  throw ConfigError("drive.norm must be 'composite' or 'per_tone'");
}

std::string norm_name(PeakNorm n) { return n == PeakNorm::kComposite ? "composite" : "per_tone"; }

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  require_object(j, "config");
  reject_unknown(j, "config",
                 {"gates", "etas", "drive", "noise", "shots", "readout_error", "seed", "threads", "check_threshold",
                  "output_dir", "populations", "qpt", "rb", "sweep", "cz"});
  read(j, "gates", "config", c.gates);
  read(j, "etas", "config", c.etas);
  read(j, "shots", "config", c.shots);
  read(j, "readout_error", "config", c.readout_error);
  read(j, "seed", "config", c.seed);
  read(j, "threads", "config", c.threads);
  read(j, "check_threshold", "config", c.check_threshold);
  if (j.contains("output_dir")) {
    std::string dir;
    read(j, "output_dir", "config", dir);
    c.output_dir = dir;
  }

  if (j.contains("drive")) {
    const json& d = j["drive"];
    require_object(d, "drive");
    reject_unknown(d, "drive", {"peak_rabi_rad_s", "norm", "samples", "tol"});
    read(d, "peak_rabi_rad_s", "drive", c.drive.peak_rabi);
    std::string norm = norm_name(c.drive.norm);
    read(d, "norm", "drive", norm);
    c.drive.norm = parse_norm(norm);
    read(d, "samples", "drive", c.drive.samples);
    read(d, "tol", "drive", c.drive.tol);
  }
  if (j.contains("noise")) {
    const json& n = j["noise"];
    require_object(n, "noise");
    reject_unknown(n, "noise", {"enabled", "t2_s", "depolarizing_rate_per_s", "lindblad_tol"});
    read(n, "enabled", "noise", c.noise.enabled);
    read(n, "t2_s", "noise", c.noise.t2);
    read(n, "depolarizing_rate_per_s", "noise", c.noise.depolarizing_rate);
    read(n, "lindblad_tol", "noise", c.noise.lindblad_tol);
  }
  if (j.contains("populations")) {
    const json& p = j["populations"];
    require_object(p, "populations");
    reject_unknown(p, "populations", {"gates", "points", "sampled"});
    read(p, "gates", "populations", c.populations.gates);
    read(p, "points", "populations", c.populations.points);
    read(p, "sampled", "populations", c.populations.sampled);
  }
  if (j.contains("qpt")) {
    const json& q = j["qpt"];
    require_object(q, "qpt");
    reject_unknown(q, "qpt", {"eta", "seeds"});
    read(q, "eta", "qpt", c.qpt.eta);
    read(q, "seeds", "qpt", c.qpt.seeds);
  }
  if (j.contains("rb")) {
    const json& r = j["rb"];
    require_object(r, "rb");
    reject_unknown(r, "rb", {"eta", "lengths", "sequences", "interleaved", "implementation",
                             "depolarizing", "shots"});
    read(r, "eta", "rb", c.rb.eta);
    read(r, "lengths", "rb", c.rb.lengths);
    read(r, "sequences", "rb", c.rb.sequences);
    read(r, "interleaved", "rb", c.rb.interleaved);
    read(r, "implementation", "rb", c.rb.implementation);
    read(r, "depolarizing", "rb", c.rb.depolarizing);
    read(r, "shots", "rb", c.rb.shots);
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    require_object(s, "sweep");
    reject_unknown(s, "sweep", {"epsilons"});
    read(s, "epsilons", "sweep", c.sweep.epsilons);
  }
  if (j.contains("cz")) {
    const json& z = j["cz"];
    require_object(z, "cz");
    reject_unknown(z, "cz",
                   {"gamma", "eta", "lamb_dicke", "trap_frequency_rad_s", "sideband_rabi_fraction"});
    read(z, "gamma", "cz", c.cz.gamma);
    read(z, "eta", "cz", c.cz.eta);
    read(z, "lamb_dicke", "cz", c.cz.lamb_dicke);
    read(z, "trap_frequency_rad_s", "cz", c.cz.trap_frequency);
    read(z, "sideband_rabi_fraction", "cz", c.cz.sideband_rabi_fraction);
  }

  check_gates(c.gates, "gates");
  check_gates(c.populations.gates, "populations.gates");
  if (!c.rb.interleaved.empty()) check_gates(c.rb.interleaved, "rb.interleaved");
  check(!c.etas.empty(), "etas: list is empty");
  for (double e : c.etas) check(std::isfinite(e) && e >= 0.0, "etas: values must be >= 0");
  check(c.drive.peak_rabi > 0.0, "drive.peak_rabi_rad_s must be > 0");
  check(c.drive.samples >= 100 && c.drive.samples % 2 == 0, "drive.samples must be even, >= 100");
  check(c.drive.tol > 0.0, "drive.tol must be > 0");
  check(c.noise.t2 > 0.0, "noise.t2_s must be > 0");
  check(c.noise.depolarizing_rate >= 0.0, "noise.depolarizing_rate_per_s must be >= 0");
  check(c.noise.lindblad_tol > 0.0, "noise.lindblad_tol must be > 0");
  check(c.shots >= 1, "shots must be >= 1");
  check(c.readout_error >= 0.0 && c.readout_error <= 0.5, "readout_error must be in [0, 0.5]");
  check(c.check_threshold > 0.0 && c.check_threshold <= 1.0, "check_threshold must be in (0, 1]");
  check(c.populations.points >= 2, "populations.points must be >= 2");
  check(c.qpt.eta >= 0.0, "qpt.eta must be >= 0");
  check(c.qpt.seeds >= 1, "qpt.seeds must be >= 1");
  check(c.rb.eta >= 0.0, "rb.eta must be >= 0");
  check(!c.rb.lengths.empty(), "rb.lengths is empty");
  for (size_t k = 0; k < c.rb.lengths.size(); ++k) {
    check(c.rb.lengths[k] >= 1 && (k == 0 || c.rb.lengths[k] > c.rb.lengths[k - 1]),
          "rb.lengths must be positive and strictly increasing");
  }
  check(c.rb.lengths.size() >= 3, "rb.lengths needs >= 3 entries for the decay fit");
  check(c.rb.sequences >= 1, "rb.sequences must be >= 1");
  check(c.rb.implementation == "simulated" || c.rb.implementation == "ideal",
        "rb.implementation must be 'simulated' or 'ideal'");
  check(c.rb.depolarizing >= 0.0 && c.rb.depolarizing <= 1.0, "rb.depolarizing must be in [0,1]");
  check(c.rb.shots >= 0, "rb.shots must be >= 0");
  check(!c.sweep.epsilons.empty(), "sweep.epsilons is empty");
  for (double e : c.sweep.epsilons) check(std::abs(e) < 1.0, "sweep.epsilons must satisfy |e| < 1");
  std::sort(c.sweep.epsilons.begin(), c.sweep.epsilons.end());
  check(c.cz.eta >= 0.0, "cz.eta must be >= 0");
  check(c.cz.lamb_dicke > 0.0, "cz.lamb_dicke must be > 0");
  check(c.cz.trap_frequency > 0.0, "cz.trap_frequency_rad_s must be > 0");
  check(c.cz.sideband_rabi_fraction > 0.0 && c.cz.sideband_rabi_fraction <= 0.5,
        "cz.sideband_rabi_fraction must be in (0, 0.5]");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_config(j);
}

nlohmann::json to_json(const ExperimentConfig& c) {
  json j;
  j["gates"] = c.gates;
  j["etas"] = c.etas;
  j["drive"] = {{"peak_rabi_rad_s", c.drive.peak_rabi},
                {"norm", norm_name(c.drive.norm)},
                {"samples", c.drive.samples},
                {"tol", c.drive.tol}};
  j["noise"] = {{"enabled", c.noise.enabled},
                {"t2_s", c.noise.t2},
                {"depolarizing_rate_per_s", c.noise.depolarizing_rate},
                {"lindblad_tol", c.noise.lindblad_tol}};
  j["shots"] = c.shots;
  j["readout_error"] = c.readout_error;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["check_threshold"] = c.check_threshold;
  j["output_dir"] = c.output_dir.string();
  j["populations"] = {{"gates", c.populations.gates},
                      {"points", c.populations.points},
                      {"sampled", c.populations.sampled}};
  j["qpt"] = {{"eta", c.qpt.eta}, {"seeds", c.qpt.seeds}};
  j["rb"] = {{"eta", c.rb.eta},
             {"lengths", c.rb.lengths},
             {"sequences", c.rb.sequences},
             {"interleaved", c.rb.interleaved},
             {"implementation", c.rb.implementation},
             {"depolarizing", c.rb.depolarizing},
             {"shots", c.rb.shots}};
  j["sweep"] = {{"epsilons", c.sweep.epsilons}};
  j["cz"] = {{"gamma", c.cz.gamma},
             {"eta", c.cz.eta},
             {"lamb_dicke", c.cz.lamb_dicke},
             {"trap_frequency_rad_s", c.cz.trap_frequency},
             {"sideband_rabi_fraction", c.cz.sideband_rabi_fraction}};
  return j;
}

}  // namespace darkloop::cli
