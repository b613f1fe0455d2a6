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

#include "qbands/config.hpp"
#include "qbands/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

namespace {

struct CommonFlags {
  std::string params;
  std::string kpath = "X,G,L:20";
  std::string mode = "2band";
  std::string backend = "exact";
  std::uint64_t shots = 8192;
  std::string noise;
  bool mitigate = false;
  std::string optimizer;
  std::uint64_t seed = 1;
  std::string out = "out";
  unsigned workers = 1;
  int layers = qbands::kDefaultThreeQubitLayers;
  std::string ansatz;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--params", f.params, "Tight-binding parameter JSON (built-in silicon defaults if omitted)");
  app->add_option("--mode", f.mode, "Band model")->check(CLI::IsMember({"2band", "8band"}));
  app->add_option("--backend", f.backend, "Expectation backend")->check(CLI::IsMember({"exact", "shots"}));
  app->add_option("--shots", f.shots, "Shots per Pauli word")->check(CLI::PositiveNumber);
  app->add_option("--noise", f.noise, "Readout-noise JSON");
  app->add_flag("--mitigate", f.mitigate, "Correct readout errors with calibrated transition rates");
  app->add_option("--optimizer", f.optimizer, "Optimizer JSON {method, max_iter, tol_ev, fd_step, restarts, seed}");
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--layers", f.layers, "Layers of the three-qubit ansatz (2 gives the 12-angle form)")
      ->check(CLI::PositiveNumber);
  app->add_option("--ansatz", f.ansatz, "Ansatz (must match --mode)")
      ->check(CLI::IsMember({"mean-field", "three-qubit"}));
}

qbands::RunConfig to_run_config(const CommonFlags& f) {
  using namespace qbands;
  RunConfig cfg;
  if (!f.params.empty()) cfg.params = tb_parameters_from_json(read_json_file(f.params));
  cfg.kpath = parse_kpath_spec(f.kpath);
  cfg.mode = f.mode == "8band" ? BandMode::EightBand : BandMode::TwoBand;
  if (!f.ansatz.empty()) cfg.ansatz = f.ansatz == "mean-field" ? AnsatzKind::MeanField : AnsatzKind::ThreeQubit;
  cfg.layers = f.layers;
  cfg.backend = f.backend == "shots" ? BackendKind::Shots : BackendKind::Exact;
  cfg.shots = f.shots;
  if (!f.noise.empty()) cfg.noise = noise_model_from_json(read_json_file(f.noise));
  cfg.mitigate = f.mitigate;
  if (cfg.mitigate && cfg.backend != BackendKind::Shots) throw std::invalid_argument("--mitigate needs --backend shots");
  if (!f.optimizer.empty()) {
    cfg.optimizer = optimizer_config_from_json(read_json_file(f.optimizer), default_optimizer(cfg.mode, cfg.backend));
  }
  cfg.seed = f.seed;
  cfg.out_dir = f.out;
  cfg.workers = f.workers;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qbands;
  CLI::App app{"Silicon band structure by variational quantum eigensolver simulation"};
  app.require_subcommand(1);

  CommonFlags bands_flags;
  auto* bands = app.add_subcommand("bands", "Band energies along a k-path, with the classical reference");
  add_common(bands, bands_flags);
  bands->add_option("--kpath", bands_flags.kpath, "Anchors and points per segment, e.g. \"X,G,L:20\"");
  bands->add_option("--workers", bands_flags.workers, "Worker threads over k-points")->check(CLI::PositiveNumber);

  CommonFlags scan_flags;
  std::string scan_k = "0.125 0.125 0.125";
  std::size_t theta_steps = 32, phi_steps = 64;
  auto* scan = app.add_subcommand("scan", "Energy surface of the mean-field ansatz at one k-point");
  add_common(scan, scan_flags);
  scan->add_option("--k", scan_k, "k-point label or fractional coordinates in 2pi/a");
  scan->add_option("--theta-steps", theta_steps, "Polar grid nodes over [0, pi]")->check(CLI::Range(2, 100000));
  scan->add_option("--phi-steps", phi_steps, "Azimuthal grid nodes over [-pi, pi]")->check(CLI::Range(2, 100000));

  std::string rates_noise, rates_out = "out";
  std::uint64_t rates_trials = 100000, rates_seed = 1;
  std::size_t rates_samples = 50;
  int rates_qubits = 0;
  auto* rates = app.add_subcommand("rates", "Time series of estimated readout transition rates");
  rates->add_option("--noise", rates_noise, "Readout-noise JSON (zero noise if omitted)");
  rates->add_option("--trials", rates_trials, "Preparations of |0> and of |1> per estimate")->check(CLI::PositiveNumber);
  rates->add_option("--samples", rates_samples, "Number of successive estimates")->check(CLI::PositiveNumber);
  rates->add_option("--qubits", rates_qubits, "Qubits to calibrate (default: entries in the noise file)");
  rates->add_option("--seed", rates_seed, "Master seed");
  rates->add_option("--out", rates_out, "Output directory");

  std::string matrix_file, decompose_out = "out";
  auto* dec = app.add_subcommand("decompose", "Pauli coefficients of a Hermitian matrix");
  dec->add_option("matrix", matrix_file, "Matrix file (.json rows of [re, im] pairs, or CSV re,im,...)")->required();
  dec->add_option("--out", decompose_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bands) {
      const auto cfg = to_run_config(bands_flags);
      const auto report = run_bands(cfg);
      std::printf("bands: %zu k-points, %zu entries, %zu non-converged, %zu zero-captures\n", report.records.size(),
                  report.summary.entries, report.summary.nonconverged, report.summary.zero_captures);
      for (std::size_t b = 0; b < report.summary.max_abs_error.size(); ++b) {
        std::printf("  band %zu: max |dE| = %.3e eV, mean |dE| = %.3e eV (converged); max |dE| = %.3e eV (all)\n", b,
                    report.summary.max_abs_error[b], report.summary.mean_abs_error[b],
                    report.summary.max_abs_error_all[b]);
      }
      std::printf("wrote %s/bands.csv and %s/bands_summary.json\n", cfg.out_dir.c_str(), cfg.out_dir.c_str());
    } else if (*scan) {
      const auto cfg = to_run_config(scan_flags);
      const auto report = run_scan(cfg, parse_kpoint(scan_k), theta_steps, phi_steps);
      const auto& s = report.surface;
      std::printf("scan: min <H> = %.9f eV at theta = %.6f, phi = %.6f; oracle ground = %.9f eV\n", s.minimum(),
                  s.theta[s.argmin_theta], s.phi[s.argmin_phi], report.oracle_ground);
      if (report.refined) {
        std::printf("  polished from the grid argmin: %.9f eV at theta = %.6f, phi = %.6f\n", report.refined->f,
                    report.refined->x[0], report.refined->x[1]);
      }
      std::printf("wrote %s/scan.csv and %s/scan_summary.json\n", cfg.out_dir.c_str(), cfg.out_dir.c_str());
    } else if (*rates) {
      std::optional<ReadoutNoiseModel> noise;
      if (!rates_noise.empty()) noise = noise_model_from_json(read_json_file(rates_noise));
      int n = rates_qubits > 0 ? rates_qubits : (noise && noise->size() > 0 ? static_cast<int>(noise->size()) : 1);
      const auto report = run_rates(noise, n, rates_trials, rates_samples, rates_seed, rates_out);
      std::printf("rates: %zu estimates over %d qubit(s); wrote %s/rates.csv\n", rates_samples, n, rates_out.c_str());
      (void)report;
    } else if (*dec) {
      const auto d = run_decompose(read_matrix_file(matrix_file), decompose_out, matrix_file);
      for (const auto& [w, c] : d.terms()) std::printf("%s %.15g\n", w.str().c_str(), c);
      std::printf("wrote %s/decomposition.csv\n", decompose_out.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
