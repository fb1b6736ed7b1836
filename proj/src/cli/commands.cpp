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

#include "darkloop/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "darkloop/benchmarking.hpp"
#include "darkloop/dynamics.hpp"
#include "darkloop/gates.hpp"
#include "darkloop/parallel.hpp"
#include "darkloop/robustness.hpp"
#include "darkloop/tomography.hpp"
#include "darkloop/two_qubit.hpp"

namespace darkloop::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Seed streams, one per subcommand, so adding a command never shifts another's draws.
enum Stream : std::uint64_t { kPopulations = 1, kQpt = 2, kRb = 3 };

class Run {
 public:
  Run(std::string command, const ExperimentConfig& cfg, std::ostream& log)
      : command_(std::move(command)), cfg_(cfg), log_(log) {
    fs::create_directories(cfg.output_dir);
  }

  const ExperimentConfig& cfg() const { return cfg_; }
  std::ostream& log() { return log_; }

  std::ofstream open(const std::string& name) {
    std::ofstream out(cfg_.output_dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (cfg_.output_dir / name).string());
    files_.push_back(name);
    return out;
  }

  void seed(const std::string& key, std::uint64_t value) { seeds_[key] = value; }

  void finish() {
    {
      std::ofstream out(cfg_.output_dir / "resolved_config.json", std::ios::binary);
      out << to_json(cfg_).dump(2) << '\n';
    }
    files_.push_back("resolved_config.json");
    std::sort(files_.begin(), files_.end());
    json m;
    m["command"] = command_;
    m["version"] = kVersion;
    m["master_seed"] = cfg_.seed;
    m["files"] = files_;
    json seeds = json::object();
    for (const auto& [k, v] : seeds_) seeds[k] = v;
    m["seeds"] = seeds;
    std::ofstream out(cfg_.output_dir / "manifest.json", std::ios::binary);
    out << m.dump(2) << '\n';
  }

 private:
  std::string command_;
  const ExperimentConfig& cfg_;
  std::ostream& log_;
  std::vector<std::string> files_;
  std::map<std::string, std::uint64_t> seeds_;
};

std::string eta_tag(double eta) { return fmt::format("eta{:g}", eta); }

std::string num(double x) { return fmt::format("{:.12g}", x); }

RealizeOptions realize_options(const ExperimentConfig& cfg, double epsilon = 0.0) {
  RealizeOptions o;
  o.n_samples = cfg.drive.samples;
  o.norm = cfg.drive.norm;
  o.epsilon = epsilon;
  o.tol = cfg.drive.tol;
  return o;
}

NoiseModel noise_model(const ExperimentConfig& cfg) {
  return NoiseModel::four_level(cfg.noise.t2, cfg.noise.depolarizing_rate);
}

// Channel of one loop, noisy when the config enables noise.
Channel gate_channel(const ExperimentConfig& cfg, const GateSpec& spec) {
  if (cfg.noise.enabled) {
    RealizeOptions o = realize_options(cfg);
    o.tol = cfg.noise.lindblad_tol;
    return realize_noisy(spec, noise_model(cfg), o).channel;
  }
  return Channel::from_unitary(realize(spec, realize_options(cfg)).full_propagator.matrix());
}

int cmd_gates(Run& run, const RunOptions& opts) {
  const ExperimentConfig& cfg = run.cfg();
  struct Row {
    std::string gate;
    double eta;
    double duration;
    double fidelity;
    double leakage;
  };
  std::vector<std::pair<std::string, double>> units;
  for (const auto& g : cfg.gates)
    for (double eta : cfg.etas) units.emplace_back(g, eta);

  std::vector<Row> rows(units.size());
  std::vector<std::string> schedules(units.size());
  parallel_for(units.size(), cfg.threads, [&](size_t k) {
    const auto& [g, eta] = units[k];
    const GateSpec spec = named_gate(g, eta, PeakRabi{cfg.drive.peak_rabi});
    const PulseSchedule schedule = synthesize(spec, cfg.drive.samples, cfg.drive.norm);
    const RealizedGate rg = realize_schedule(schedule, cfg.drive.tol);
    rows[k] = {g, eta, rg.duration, gate_fidelity(rg, target_unitary(named_gate_angles(g))),
               rg.leakage};
    std::ostringstream os;
    write_schedule_csv(os, schedule);
    schedules[k] = os.str();
  });

  auto out = run.open("gates.csv");
  out << "gate,eta,T_s,fidelity,leakage\n";
  bool ok = true;
  for (size_t k = 0; k < rows.size(); ++k) {
    const Row& r = rows[k];
    out << fmt::format("{},{:g},{},{:.15f},{:.6e}\n", r.gate, r.eta, num(r.duration), r.fidelity,
                       r.leakage);
    run.open(fmt::format("schedule_{}_{}.csv", r.gate, eta_tag(r.eta))) << schedules[k];
    const bool pass = r.fidelity >= cfg.check_threshold;
    ok = ok && pass;
    fmt::print(run.log(), "{:>2} eta={:<3g} T={:8.2f} us  F={:.12f}  leak={:.2e}{}\n", r.gate,
               r.eta, r.duration * 1e6, r.fidelity, r.leakage,
               opts.check && !pass ? "  BELOW THRESHOLD" : "");
  }
  return opts.check && !ok ? 1 : 0;
}

void write_sampled_csv(std::ostream& os, const PopulationTrace& t, int shots) {
  os << "t_s,p0,p1,p2,pa,sd0,sd1,sd2,sda\n";
  for (size_t k = 0; k < t.times.size(); ++k) {
    const auto& p = t.populations[k];
    os << num(t.times[k]);
    for (double x : p) os << ',' << num(x);
    for (double x : p) os << ',' << num(std::sqrt(x * (1.0 - x) / shots));
    os << '\n';
  }
}

int cmd_populations(Run& run, const RunOptions&) {
  const ExperimentConfig& cfg = run.cfg();
  const std::uint64_t stream = derive_seed(cfg.seed, kPopulations);
  if (cfg.populations.sampled) run.seed("populations", stream);
  std::vector<std::pair<std::string, double>> units;
  for (const auto& g : cfg.populations.gates)
    for (double eta : cfg.etas) units.emplace_back(g, eta);

  struct Out {
    std::string exact, sampled, noisy;
  };
  std::vector<Out> outs(units.size());
  const StateVector psi0 = StateVector::basis(level::kCount, level::k0, four_level_labels());
  parallel_for(units.size(), cfg.threads, [&](size_t k) {
    const auto& [g, eta] = units[k];
    const GateSpec spec = named_gate(g, eta, PeakRabi{cfg.drive.peak_rabi});
    const HamiltonianModel model(synthesize(spec, cfg.drive.samples, cfg.drive.norm));
    const int intervals = cfg.populations.points - 1;
    const PopulationTrace exact =
        population_trace(psi0, model, std::nullopt, intervals, cfg.drive.tol);
    std::ostringstream os;
    write_trajectory_csv(os, exact);
    outs[k].exact = os.str();
    if (cfg.populations.sampled) {
      std::ostringstream ss;
      write_sampled_csv(ss, sample_population_trace(exact, cfg.shots, derive_seed(stream, k)),
                        cfg.shots);
      outs[k].sampled = ss.str();
    }
    if (cfg.noise.enabled) {
      std::ostringstream ns;
      write_trajectory_csv(ns,
                           population_trace(psi0, model, noise_model(cfg), intervals,
                                            cfg.noise.lindblad_tol),
                           true);
      outs[k].noisy = ns.str();
    }
  });
  for (size_t k = 0; k < units.size(); ++k) {
    const std::string stem = fmt::format("populations_{}_{}", units[k].first, eta_tag(units[k].second));
    run.open(stem + ".csv") << outs[k].exact;
    if (!outs[k].sampled.empty()) run.open(stem + "_sampled.csv") << outs[k].sampled;
    if (!outs[k].noisy.empty()) run.open(stem + "_noisy.csv") << outs[k].noisy;
    fmt::print(run.log(), "{:>2} eta={:g}: {}.csv\n", units[k].first, units[k].second, stem);
  }
  return 0;
}

int cmd_qpt(Run& run, const RunOptions&) {
  const ExperimentConfig& cfg = run.cfg();
  const std::uint64_t stream = derive_seed(cfg.seed, kQpt);
  run.seed("qpt", stream);
  auto summary = run.open("qpt_summary.csv");
  summary << "gate,eta,shots,seed_index,fidelity\n";
  for (size_t gi = 0; gi < cfg.gates.size(); ++gi) {
    const std::string& g = cfg.gates[gi];
    const GateSpec spec = named_gate(g, cfg.qpt.eta, PeakRabi{cfg.drive.peak_rabi});
    const QubitProcess process = qubit_process(gate_channel(cfg, spec));
    const Eigen::Matrix2cd target = target_unitary(named_gate_angles(g)).matrix();

    const QptResult exact = qpt(process, target, std::nullopt);
    {
      auto out = run.open(fmt::format("chi_{}_exact.csv", g));
      write_chi_csv(out, exact.chi, exact.fidelity);
    }
    summary << fmt::format("{},{:g},0,-1,{:.15f}\n", g, cfg.qpt.eta, exact.fidelity);

    const std::uint64_t gate_seed = derive_seed(stream, gi);
    std::vector<QptResult> sampled(cfg.qpt.seeds);
    parallel_for(sampled.size(), cfg.threads, [&](size_t s) {
      sampled[s] = qpt(process, target,
                       ShotConfig{cfg.shots, derive_seed(gate_seed, s), cfg.readout_error});
    });
    double mean = 0.0;
    for (size_t s = 0; s < sampled.size(); ++s) {
      summary << fmt::format("{},{:g},{},{},{:.15f}\n", g, cfg.qpt.eta, cfg.shots, s,
                             sampled[s].fidelity);
      mean += sampled[s].fidelity / static_cast<double>(sampled.size());
    }
    auto chi_out = run.open(fmt::format("chi_{}_seed0.csv", g));
    write_chi_csv(chi_out, sampled.front().chi, sampled.front().fidelity);
    fmt::print(run.log(), "{:>2}: exact F={:.9f}  {}-shot mean F={:.6f} over {} seeds\n", g,
               exact.fidelity, cfg.shots, mean, cfg.qpt.seeds);
  }
  return 0;
}

// Realizing a loop is the expensive part of RB; every curve reuses the same 24 channels.
class CachedImplementation {
 public:
  explicit CachedImplementation(GateImplementation inner) : inner_(std::move(inner)) {}

  Channel operator()(const GateAngles& a) {
    std::array<std::uint64_t, 3> key{};
    std::memcpy(&key[0], &a.theta, sizeof(double));
    std::memcpy(&key[1], &a.phi, sizeof(double));
    std::memcpy(&key[2], &a.gamma, sizeof(double));
    {
      std::lock_guard lock(mu_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    Channel c = inner_(a);
    std::lock_guard lock(mu_);
    return cache_.emplace(key, std::move(c)).first->second;
  }

 private:
  GateImplementation inner_;
  std::mutex mu_;
  std::map<std::array<std::uint64_t, 3>, Channel> cache_;
};

json fit_json(const FitResult& f) {
  return {{"A", f.a}, {"r", f.r}, {"B", f.b}, {"residual", f.residual}, {"converged", f.converged}};
}

int cmd_rb(Run& run, const RunOptions&) {
  const ExperimentConfig& cfg = run.cfg();
  const std::uint64_t stream = derive_seed(cfg.seed, kRb);
  run.seed("rb", stream);

  GateImplementation base;
  if (cfg.rb.implementation == "ideal") {
    base = ideal_gate_implementation();
  } else {
    base = [&cfg](const GateAngles& a) {
      return gate_channel(cfg, GateSpec(a.theta, a.phi, a.gamma, cfg.rb.eta,
                                        PeakRabi{cfg.drive.peak_rabi}));
    };
  }
  if (cfg.rb.depolarizing > 0.0) {
    base = [inner = base, p = cfg.rb.depolarizing](const GateAngles& a) {
      Channel c = inner(a);
      return Channel::qubit_depolarizing(c.dim(), p).after(c);
    };
  }
  auto cache = std::make_shared<CachedImplementation>(base);
  const GateImplementation impl = [cache](const GateAngles& a) { return (*cache)(a); };

  RBConfig rb;
  rb.lengths = cfg.rb.lengths;
  rb.sequences_per_length = cfg.rb.sequences;
  rb.seed = stream;
  rb.shots = cfg.rb.shots;
  rb.readout_error = cfg.readout_error;
  rb.threads = cfg.threads;

  const RBResult ref = rb_run(rb, impl);
  {
    auto out = run.open("rb_reference.csv");
    write_rb_csv(out, ref.reference);
  }
  const double r_ref = ref.reference.fit.r;
  json summary;
  summary["implementation"] = cfg.rb.implementation;
  summary["eta"] = cfg.rb.eta;
  summary["depolarizing"] = cfg.rb.depolarizing;
  summary["shots"] = cfg.rb.shots;
  summary["reference"] = fit_json(ref.reference.fit);
  summary["reference"]["F_ave"] = 1.0 - (1.0 - r_ref) / 2.0;
  fmt::print(run.log(), "reference: r={:.8f}  F_ave={:.6f}\n", r_ref, 1.0 - (1.0 - r_ref) / 2.0);

  json inter = json::object();
  for (const auto& g : cfg.rb.interleaved) {
    rb.interleaved = named_gate_angles(g);
    const RBResult res = rb_run(rb, impl);
    auto out = run.open(fmt::format("rb_interleaved_{}.csv", g));
    write_rb_csv(out, *res.interleaved);
    json entry = fit_json(res.interleaved->fit);
    const double r_int = res.interleaved->fit.r;
    if (r_ref > 0.0 && r_int > 0.0) {
      entry["F_gate"] = rb_fidelities(r_ref, r_int).gate;
      fmt::print(run.log(), "{:>2} interleaved: r={:.8f}  F_gate={:.6f}\n", g, r_int,
                 rb_fidelities(r_ref, r_int).gate);
    } else {
      entry["F_gate"] = nullptr;
    }
    inter[g] = entry;
  }
  summary["interleaved"] = inter;
  run.open("rb_summary.json") << summary.dump(2) << '\n';
  return 0;
}

int cmd_sweep(Run& run, const RunOptions&) {
  const ExperimentConfig& cfg = run.cfg();
  SweepConfig sc;
  sc.gates = cfg.gates;
  sc.etas = cfg.etas;
  sc.epsilons = cfg.sweep.epsilons;
  sc.peak_rabi = cfg.drive.peak_rabi;
  sc.norm = cfg.drive.norm;
  sc.tol = cfg.drive.tol;
  sc.threads = cfg.threads;
  const std::vector<SweepRow> rows = robustness_sweep(sc);
  {
    auto out = run.open("sweep.csv");
    write_sweep_csv(out, rows);
  }
  fmt::print(run.log(), "noiseless sweep: {} points\n", rows.size());
  if (cfg.noise.enabled) {
    sc.noise = noise_model(cfg);
    sc.tol = cfg.noise.lindblad_tol;
    const std::vector<SweepRow> noisy = robustness_sweep(sc);
    auto out = run.open("sweep_decoherence.csv");
    write_sweep_csv(out, noisy);
    fmt::print(run.log(), "decoherence sweep: {} points (T2={:g} s)\n", noisy.size(),
               cfg.noise.t2);
  }
  return 0;
}

int cmd_cz(Run& run, const RunOptions& opts) {
  const ExperimentConfig& cfg = run.cfg();
  const ControlledPhaseResult r =
      controlled_phase_gate(cfg.cz.gamma, PeakRabi{cfg.drive.peak_rabi}, cfg.drive.tol, cfg.cz.eta);
  {
    auto out = run.open("cz.csv");
    write_cz_csv(out, r);
  }
  Eigen::Matrix4cd target = Eigen::Matrix4cd::Identity();
  target(3, 3) = std::exp(kI * cfg.cz.gamma);
  const double fidelity = std::abs((target.adjoint() * r.block).trace()) / 4.0;
  fmt::print(run.log(), "controlled phase gamma={:g}: T={:.2f} us  F={:.12f}  leak={:.2e}\n",
             cfg.cz.gamma, r.duration * 1e6, fidelity, r.leakage);
  return opts.check && fidelity < cfg.check_threshold ? 1 : 0;
}

int cmd_sideband(Run& run, const RunOptions&) {
  const ExperimentConfig& cfg = run.cfg();
  SpinPhononModel model;
  model.lamb_dicke = cfg.cz.lamb_dicke;
  model.trap_frequency = cfg.cz.trap_frequency;
  model.rabi = cfg.cz.sideband_rabi_fraction * cfg.cz.trap_frequency;
  auto out = run.open("sideband.csv");
  out << "phonons,frequency_rad_s,expected_rad_s,relative_error,max_top_fock\n";
  for (int n = 0; n <= 1; ++n) {
    const SidebandMeasurement m = measure_blue_sideband(model, n);
    const double rel = std::abs(m.frequency - m.expected) / m.expected;
    out << fmt::format("{},{},{},{:.6e},{:.6e}\n", n, num(m.frequency), num(m.expected), rel,
                       m.max_top_fock_population);
    fmt::print(run.log(), "blue sideband n={}: {:.2f} rad/s vs {:.2f} rad/s ({:.3f}%)\n", n,
               m.frequency, m.expected, 100.0 * rel);
  }

  // One blue-sideband trace from |down, 0> for plotting.
  model.detuning = model.trap_frequency;
  const double period = 2.0 * kPi / (model.lamb_dicke * model.rabi);
  const SidebandEvolution ev = sideband_evolution(
      model, StateVector::basis(model.dim(), model.index(0, 0)), 2.0 * period, 400);
  auto trace = run.open("sideband_trace.csv");
  trace << "t_s,p_up\n";
  for (size_t k = 0; k < ev.times.size(); ++k) {
    double up = 0.0;
    for (int n = 0; n < model.fock_levels; ++n) up += ev.populations[k][model.index(1, n)];
    trace << num(ev.times[k]) << ',' << num(up) << '\n';
  }
  return 0;
}

using Handler = int (*)(Run&, const RunOptions&);

const std::vector<std::pair<std::string, Handler>>& handlers() {
  static const std::vector<std::pair<std::string, Handler>> h = {
      {"gates", cmd_gates}, {"populations", cmd_populations}, {"qpt", cmd_qpt},
      {"rb", cmd_rb},       {"sweep", cmd_sweep},             {"cz", cmd_cz},
      {"sideband", cmd_sideband}};
  return h;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, _] : handlers()) n.push_back(name);
    return n;
  }();
  return names;
}

int run_command(const std::string& name, const ExperimentConfig& cfg, const RunOptions& opts,
                std::ostream& log) {
  for (const auto& [n, handler] : handlers()) {
    if (n != name) continue;
    Run run(name, cfg, log);
    const int code = handler(run, opts);
    run.finish();
    return code;
  }
  throw std::invalid_argument("unknown command: " + name);
}

}  // namespace darkloop::cli
