// Copyright 2026 The qbands Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end runs behind the command-line tool: band structures along a
// k-path, mean-field parameter scans, transition-rate time series and
// stand-alone Pauli decompositions. Every emitted CSV starts with a single
// '#'-prefixed JSON line carrying the config digest and seed.

#pragma once

#include "qbands/config.hpp"
#include "qbands/pauli.hpp"
#include "qbands/sampler.hpp"
#include "qbands/tightbinding.hpp"
#include "qbands/vqe.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#ifndef QBANDS_VERSION
#define QBANDS_VERSION "0.1.0"
#endif

namespace qbands {

enum class BandMode { TwoBand, EightBand };
enum class BackendKind { Exact, Shots };

inline std::string to_string(BandMode m) { return m == BandMode::TwoBand ? "2band" : "8band"; }
inline std::string to_string(BackendKind b) { return b == BackendKind::Exact ? "exact" : "shots"; }

struct RunConfig {
  TBParameters params;
  KPathSpec kpath{{kpoints::X(), kpoints::gamma(), kpoints::L()}, 20};
  BandMode mode = BandMode::TwoBand;
  std::optional<AnsatzKind> ansatz;  // must agree with `mode` when given
  int layers = kDefaultThreeQubitLayers;
  BackendKind backend = BackendKind::Exact;
  std::uint64_t shots = 8192;
  std::optional<ReadoutNoiseModel> noise;
  bool mitigate = false;
  std::uint64_t rate_trials = 100000;
  std::optional<OptimizerConfig> optimizer;  // defaults depend on mode and backend
  std::string out_dir;                       // empty: nothing written
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

// Restarts: 3 for the mean-field form, 20 for three qubits. Finite-difference
// step: 1e-4 rad on the exact backend, pi/32 under shot noise.
inline OptimizerConfig default_optimizer(BandMode mode, BackendKind backend) {
  OptimizerConfig c;
  c.method = OptimizerMethod::QuasiNewton;
  c.restarts = mode == BandMode::TwoBand ? 3 : 20;
  if (backend == BackendKind::Exact) {
    c.fd_step = 1e-4;
    c.tol_ev = 1e-10;
    c.max_iter = 2000;
  } else {
    c.fd_step = kPi / 32.0;
    c.tol_ev = 1e-3;
    c.max_iter = 60;
  }
  return c;
}

inline OptimizerConfig resolved_optimizer(const RunConfig& cfg) {
  return cfg.optimizer.value_or(default_optimizer(cfg.mode, cfg.backend));
}

inline Ansatz ansatz_for(const RunConfig& cfg) {
  const AnsatzKind expected = cfg.mode == BandMode::TwoBand ? AnsatzKind::MeanField : AnsatzKind::ThreeQubit;
  if (cfg.ansatz && *cfg.ansatz != expected) {
    throw std::invalid_argument(cfg.mode == BandMode::TwoBand ? "two-band mode requires the mean-field ansatz"
                                                              : "eight-band mode requires the three-qubit ansatz");
  }
  return Ansatz(expected, cfg.layers);
}

inline json to_json(const RunConfig& cfg) {
  json anchors = json::array();
  for (const auto& k : cfg.kpath.anchors) anchors.push_back({k.frac[0], k.frac[1], k.frac[2]});
  json j = {{"params", to_json(cfg.params)},
            {"kpath", {{"anchors", anchors}, {"points_per_segment", cfg.kpath.points_per_segment}}},
            {"mode", to_string(cfg.mode)},
            {"layers", cfg.mode == BandMode::EightBand ? cfg.layers : 1},
            {"backend", to_string(cfg.backend)},
            {"optimizer", to_json(resolved_optimizer(cfg))},
            {"seed", cfg.seed}};
  if (cfg.backend == BackendKind::Shots) {
    j["shots"] = cfg.shots;
    j["mitigate"] = cfg.mitigate;
    j["rate_trials"] = cfg.rate_trials;
    j["noise"] = cfg.noise ? to_json(*cfg.noise) : json(nullptr);
  }
  return j;
}

// 64-bit FNV-1a of the compact JSON form, as 16 hex digits.
inline std::string config_digest(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json output_header(const std::string& command, const json& config, std::uint64_t seed) {
  return {{"tool", "qbands"},
          {"version", QBANDS_VERSION},
          {"command", command},
          {"seed", seed},
          {"config_digest", config_digest(config)},
          {"config", config}};
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

namespace detail {

inline std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

inline void write_json_file(const std::string& dir, const std::string& name, const json& j) {
  auto out = open_output(dir, name);
  out << j.dump(2) << '\n';
}

// Runs body(i) for i in [0, n) on `workers` threads; results are keyed by i.
template <typename Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

// Backend for a run. Mitigation rates are calibrated once here unless the
// noise drifts, in which case every optimizer iteration recalibrates.
inline Backend make_backend(const RunConfig& cfg, int qubits) {
  if (cfg.backend == BackendKind::Exact) return ExactBackend{};
  ShotBackend sb;
  sb.shots = cfg.shots;
  sb.noise = cfg.noise;
  sb.mitigate = cfg.mitigate;
  sb.rate_trials = cfg.rate_trials;
  if (cfg.mitigate && !(cfg.noise && cfg.noise->has_drift())) {
    sb.mitigation_rates = estimate_transition_rates(qubits, cfg.noise, cfg.rate_trials, derive_seed(cfg.seed, {0xca1ULL}));
  }
  return sb;
}

struct BandRecord {
  std::size_t k_index = 0;
  KPoint k;
  double path_coordinate = 0.0;
  std::vector<double> energies;  // ascending
  std::vector<double> oracle;    // classical diagonalization, ascending
  std::vector<std::size_t> evaluations;
  std::vector<bool> converged;
  std::vector<double> residual;
  std::vector<double> tolerance;  // 3 sigma statistical tolerance; 0 on the exact backend
  bool zero_capture = false;
};

struct BandSummary {
  std::vector<double> max_abs_error;  // per band, converged entries only
  std::vector<double> mean_abs_error;
  std::vector<double> max_abs_error_all;  // per band, every entry
  std::size_t entries = 0;
  std::size_t nonconverged = 0;
  std::size_t zero_captures = 0;
};

struct BandsReport {
  json header;
  std::vector<BandRecord> records;
  BandSummary summary;
};

// Statistical standard error of each level found by full_spectrum on a shot
// backend: the direct estimate's error plus, for every earlier deflation, the
// error its estimated projector leaves in the operator,
// |e_l| sqrt(4^n - 1) / 2^n * gain / sqrt(M).
inline std::vector<double> level_standard_errors(const SpectralDecomposition& d, const SpectrumResult& spectrum,
                                                 const Backend& backend) {
  std::vector<double> out(spectrum.levels.size(), 0.0);
  const auto* sb = std::get_if<ShotBackend>(&backend);
  if (!sb) return out;
  const int n = d.qubits();
  double gain = 1.0;
  if (sb->mitigate) {
    const auto& rates = sb->mitigation_rates ? sb->mitigation_rates : sb->noise;
    if (rates) {
      for (int q = 1; q <= n; ++q) gain /= 1.0 - rates->at(q).p_plus();
    }
  }
  const double direct = energy_standard_error_bound(d, backend);
  const double per_word = std::sqrt(static_cast<double>(pauli_basis_size(n) - 1)) /
                          static_cast<double>(std::size_t{1} << n) * gain /
                          std::sqrt(static_cast<double>(sb->shots));
  double accumulated = 0.0;
  for (std::size_t j = 0; j < spectrum.levels.size(); ++j) {
    out[j] = std::sqrt(direct * direct + accumulated);
    const double eps = spectrum.levels[j].energy - spectrum.shift;
    accumulated += std::pow(std::abs(eps) * per_word, 2);
  }
  return out;
}

inline BandRecord solve_kpoint(const RunConfig& cfg, const KPath& path, std::size_t i, const Backend& backend) {
  const Ansatz ansatz = ansatz_for(cfg);
  const KPoint& k = path.points[i];
  const BlochHamiltonian h =
      cfg.mode == BandMode::TwoBand ? build_s_block(cfg.params, k) : build_full_hamiltonian(cfg.params, k);
  const auto decomp = decompose(h);
  OptimizerConfig opt = resolved_optimizer(cfg);
  opt.seed = derive_seed(cfg.seed, {i, opt.seed});

  const auto spectrum = full_spectrum(decomp, h.dimension(), ansatz, backend, opt);
  const auto sigma = level_standard_errors(decomp, spectrum, backend);

  BandRecord rec;
  rec.k_index = i;
  rec.k = k;
  rec.path_coordinate = path.coordinate[i];
  rec.oracle = diagonalize_classical(h);
  rec.zero_capture = spectrum.zero_capture;
  std::vector<std::size_t> order(spectrum.levels.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return spectrum.levels[a].energy < spectrum.levels[b].energy; });
  for (std::size_t j : order) {
    const auto& lv = spectrum.levels[j];
    rec.energies.push_back(lv.energy);
    rec.evaluations.push_back(lv.vqe.evaluations);
    rec.converged.push_back(lv.vqe.converged && !lv.zero_captured);
    rec.residual.push_back(lv.residual);
    rec.tolerance.push_back(3.0 * sigma[j]);
  }
  return rec;
}

inline BandSummary summarize(const std::vector<BandRecord>& records) {
  BandSummary s;
  if (records.empty()) return s;
  const std::size_t bands = records.front().energies.size();
  s.max_abs_error.assign(bands, 0.0);
  s.mean_abs_error.assign(bands, 0.0);
  s.max_abs_error_all.assign(bands, 0.0);
  std::vector<std::size_t> used(bands, 0);
  for (const auto& r : records) {
    s.zero_captures += r.zero_capture;
    for (std::size_t b = 0; b < bands; ++b) {
      ++s.entries;
      s.max_abs_error_all[b] = std::max(s.max_abs_error_all[b], std::abs(r.energies[b] - r.oracle[b]));
      if (!r.converged[b]) {
        ++s.nonconverged;
        continue;
      }
      const double err = std::abs(r.energies[b] - r.oracle[b]);
      s.max_abs_error[b] = std::max(s.max_abs_error[b], err);
      s.mean_abs_error[b] += err;
      ++used[b];
    }
  }
  for (std::size_t b = 0; b < bands; ++b) {
    if (used[b]) s.mean_abs_error[b] /= static_cast<double>(used[b]);
  }
  return s;
}

inline void write_bands(const std::string& dir, const BandsReport& report) {
  auto out = detail::open_output(dir, "bands.csv");
  out << "# " << report.header.dump() << '\n';
  out << "k_index,kx,ky,kz,label,path,band,energy_vqe,energy_oracle,abs_error,tolerance,evaluations,converged,"
         "residual\n";
  for (const auto& r : report.records) {
    for (std::size_t b = 0; b < r.energies.size(); ++b) {
      out << r.k_index << ',' << format_double(r.k.frac[0]) << ',' << format_double(r.k.frac[1]) << ','
          << format_double(r.k.frac[2]) << ',' << r.k.label << ',' << format_double(r.path_coordinate) << ','
          << b << ',' << format_double(r.energies[b]) << ',' << format_double(r.oracle[b]) << ','
          << format_double(std::abs(r.energies[b] - r.oracle[b])) << ',' << format_double(r.tolerance[b]) << ','
          << r.evaluations[b] << ',' << (r.converged[b] ? 1 : 0) << ',' << format_double(r.residual[b]) << '\n';
    }
  }
  json summary = {{"header", report.header},
                  {"entries", report.summary.entries},
                  {"nonconverged", report.summary.nonconverged},
                  {"zero_captures", report.summary.zero_captures},
                  {"max_abs_error", report.summary.max_abs_error},
                  {"mean_abs_error", report.summary.mean_abs_error},
                  {"max_abs_error_all", report.summary.max_abs_error_all}};
  detail::write_json_file(dir, "bands_summary.json", summary);
}

inline BandsReport run_bands(const RunConfig& cfg) {
  ansatz_for(cfg);
  const KPath path = make_kpath(cfg.kpath.anchors, cfg.kpath.points_per_segment);
  const int qubits = cfg.mode == BandMode::TwoBand ? 1 : 3;
  const Backend backend = make_backend(cfg, qubits);

  BandsReport report;
  const json config = to_json(cfg);
  report.header = output_header("bands", config, cfg.seed);
  report.records.resize(path.size());
  detail::parallel_for(path.size(), cfg.workers,
                       [&](std::size_t i) { report.records[i] = solve_kpoint(cfg, path, i, backend); });
  report.summary = summarize(report.records);
  if (!cfg.out_dir.empty()) write_bands(cfg.out_dir, report);
  return report;
}

struct ScanReport {
  json header;
  KPoint k;
  SpectralDecomposition decomposition;
  ScanSurface surface;
  double oracle_ground = 0.0;
  double standard_error = 0.0;  // per node; 0 on the exact backend
  // Local quasi-Newton polish started at the grid argmin; exact backend only.
  std::optional<OptimizeResult> refined;
};

inline ScanReport run_scan(const RunConfig& cfg, const KPoint& k, std::size_t theta_steps = 32,
                           std::size_t phi_steps = 64) {
  if (cfg.mode != BandMode::TwoBand) throw std::invalid_argument("scan is only defined for the two-band mode");
  const auto h = build_s_block(cfg.params, k);
  ScanReport report;
  report.k = k;
  report.decomposition = decompose(h);
  const Backend backend = make_backend(cfg, 1);
  report.surface = grid_scan(report.decomposition, theta_steps, phi_steps, backend, derive_seed(cfg.seed, {0x5ca9ULL}));
  report.oracle_ground = diagonalize_classical(h).front();
  report.standard_error = energy_standard_error_bound(report.decomposition, backend);
  if (is_exact(backend)) {
    const auto& surf = report.surface;
    const auto& d = report.decomposition;
    report.refined = optimize_quasinewton(
        [&](std::span<const double> x) { return exact_expectation(prepare_meanfield(x[0], x[1]), d); },
        {surf.theta[surf.argmin_theta], surf.phi[surf.argmin_phi]}, default_optimizer(BandMode::TwoBand, BackendKind::Exact));
  }

  json config = to_json(cfg);
  config.erase("kpath");
  config.erase("optimizer");
  config["k"] = {k.frac[0], k.frac[1], k.frac[2]};
  config["grid"] = {theta_steps, phi_steps};
  report.header = output_header("scan", config, cfg.seed);

  if (!cfg.out_dir.empty()) {
    auto out = detail::open_output(cfg.out_dir, "scan.csv");
    out << "# " << report.header.dump() << '\n' << "theta,phi,energy\n";
    const auto& s = report.surface;
    for (std::size_t i = 0; i < s.theta.size(); ++i) {
      for (std::size_t j = 0; j < s.phi.size(); ++j) {
        out << format_double(s.theta[i]) << ',' << format_double(s.phi[j]) << ',' << format_double(s.at(i, j)) << '\n';
      }
      out << '\n';  // blank line between theta rows for gnuplot's pm3d
    }
    json summary = {{"header", report.header},
                    {"argmin_theta", s.theta[s.argmin_theta]},
                    {"argmin_phi", s.phi[s.argmin_phi]},
                    {"min_energy", s.minimum()},
                    {"oracle_ground", report.oracle_ground},
                    {"standard_error", report.standard_error}};
    if (report.refined) {
      summary["refined"] = {{"theta", report.refined->x[0]},
                            {"phi", report.refined->x[1]},
                            {"energy", report.refined->f}};
    }
    detail::write_json_file(cfg.out_dir, "scan_summary.json", summary);
  }
  return report;
}

struct RateSample {
  std::size_t index = 0;
  int qubit = 1;
  double w01 = 0.0;
  double w10 = 0.0;
};

struct RatesReport {
  json header;
  std::vector<RateSample> samples;
};

// Repeated calibrations at trial clock 0, 1, 2, ...; drift in the model shows
// up as a modulation of the w10 series.
inline RatesReport run_rates(const std::optional<ReadoutNoiseModel>& noise, int qubits, std::uint64_t trials,
                             std::size_t samples, std::uint64_t seed, const std::string& out_dir = {}) {
  RatesReport report;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto est = estimate_transition_rates(qubits, noise, trials, derive_seed(seed, {i}), static_cast<double>(i));
    for (int q = 1; q <= qubits; ++q) report.samples.push_back({i, q, est.at(q).w01, est.at(q).w10});
  }
  json config = {{"noise", noise ? to_json(*noise) : json(nullptr)},
                 {"qubits", qubits},
                 {"trials", trials},
                 {"samples", samples}};
  report.header = output_header("rates", config, seed);
  if (!out_dir.empty()) {
    auto out = detail::open_output(out_dir, "rates.csv");
    out << "# " << report.header.dump() << '\n' << "sample,qubit,w01,w10\n";
    for (const auto& s : report.samples) {
      out << s.index << ',' << s.qubit << ',' << format_double(s.w01) << ',' << format_double(s.w10) << '\n';
    }
  }
  return report;
}

inline SpectralDecomposition run_decompose(const Matrix& m, const std::string& out_dir = {},
                                           const std::string& source = {}) {
  if (!is_hermitian(m, 1e-10)) throw std::invalid_argument("input matrix is not Hermitian");
  auto d = decompose(m);
  if (!out_dir.empty()) {
    json config = {{"source", source}, {"dimension", m.rows()}};
    auto out = detail::open_output(out_dir, "decomposition.csv");
    out << "# " << output_header("decompose", config, 0).dump() << '\n' << "word,coefficient\n";
    for (const auto& [w, c] : d.terms()) out << w.str() << ',' << format_double(c) << '\n';
  }
  return d;
}

}  // namespace qbands
