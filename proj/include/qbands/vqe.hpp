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

// Variational driver: energy estimation on the exact or shot backend,
// ground-state search with random restarts, mean-field parameter scans and
// full spectra by identity shift plus iterative deflation.

#pragma once

#include "qbands/optimize.hpp"
#include "qbands/pauli.hpp"
#include "qbands/qsim.hpp"
#include "qbands/rng.hpp"
#include "qbands/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qbands {

struct ExactBackend {};

struct ShotBackend {
  std::uint64_t shots = 8192;
  std::optional<ReadoutNoiseModel> noise;
  bool mitigate = false;
  // Rates assumed by mitigation. Estimated from `rate_trials` calibration
  // shots when absent, and re-estimated every optimizer iteration when the
  // noise drifts.
  std::optional<ReadoutNoiseModel> mitigation_rates;
  std::uint64_t rate_trials = 100000;
};

using Backend = std::variant<ExactBackend, ShotBackend>;

inline bool is_exact(const Backend& b) { return std::holds_alternative<ExactBackend>(b); }

// Upper bound on the standard error of one shot-based energy estimate:
// sqrt(sum_{i != I} c_i^2 g_i^2 / M), where g_i = prod 1 / (1 - p+) over the
// measured qubits of word i when mitigation is on.
inline double energy_standard_error_bound(const SpectralDecomposition& d, const Backend& backend) {
  const auto* shots = std::get_if<ShotBackend>(&backend);
  if (!shots) return 0.0;
  double var = 0.0;
  for (const auto& [w, c] : d.terms()) {
    if (w.is_identity()) continue;
    double gain = 1.0;
    if (shots->mitigate) {
      const auto& rates = shots->mitigation_rates ? shots->mitigation_rates : shots->noise;
      if (rates) {
        for (int q = 1; q <= w.qubits(); ++q) {
          if (w.letter(q) != 'I') gain /= 1.0 - rates->at(q).p_plus();
        }
      }
    }
    var += c * c * gain * gain;
  }
  return std::sqrt(var / static_cast<double>(shots->shots));
}

// <H> for states of one decomposition on one backend. The shot backend draws
// every word from its own seed stream indexed by an evaluation counter.
class EnergyEstimator {
 public:
  EnergyEstimator(const SpectralDecomposition& d, Backend backend, std::uint64_t seed)
      : decomp_(d), backend_(std::move(backend)), seed_(seed) {
    if (is_exact(backend_)) {
      dense_ = reconstruct_matrix(decomp_);
    } else {
      auto& sb = std::get<ShotBackend>(backend_);
      if (sb.shots < 1) throw std::invalid_argument("shot count must be >= 1");
      if (sb.mitigate && !sb.mitigation_rates) recalibrate();
    }
  }

  const SpectralDecomposition& decomposition() const { return decomp_; }
  const Backend& backend() const { return backend_; }
  double clock() const { return clock_; }

  double energy(const StateVector& psi) {
    ++evaluations_;
    if (is_exact(backend_)) {
      const auto& a = psi.amplitudes();
      const auto dim = static_cast<Eigen::Index>(a.size());
      Eigen::Map<const Vector> v(a.data(), dim);
      return (v.adjoint() * dense_ * v)(0, 0).real();
    }
    double e = 0.0;
    for (const auto& [w, c] : decomp_.terms()) e += c * shot_expectation(psi, w, evaluations_);
    return e;
  }

  // All 4^n word expectations in `psi`, as needed for deflation.
  PauliExpectations expectations(const StateVector& psi) {
    if (is_exact(backend_)) return exact_pauli_expectations(psi);
    ++evaluations_;
    PauliExpectations out(psi.qubits());
    for (std::size_t i = 0; i < pauli_basis_size(psi.qubits()); ++i) {
      const auto w = PauliWord::from_index(psi.qubits(), i);
      out.set(w, shot_expectation(psi, w, evaluations_));
    }
    return out;
  }

  // Advances the trial clock by one optimizer iteration.
  void tick() {
    clock_ += 1.0;
    if (auto* sb = std::get_if<ShotBackend>(&backend_); sb && sb->mitigate && sb->noise && sb->noise->has_drift()) {
      recalibrate();
    }
  }

 private:
  void recalibrate() {
    auto& sb = std::get<ShotBackend>(backend_);
    sb.mitigation_rates = estimate_transition_rates(decomp_.qubits(), sb.noise, sb.rate_trials,
                                                    derive_seed(seed_, {0xca1ULL, calibrations_++}), clock_);
  }

  double shot_expectation(const StateVector& psi, const PauliWord& w, std::uint64_t eval) const {
    const auto& sb = std::get<ShotBackend>(backend_);
    return estimate_pauli(psi, w, sb.shots, sb.noise,
                          sb.mitigate ? sb.mitigation_rates : std::nullopt,
                          derive_seed(seed_, {eval, w.index()}), clock_);
  }

  SpectralDecomposition decomp_;
  Backend backend_;
  std::uint64_t seed_;
  Matrix dense_;
  std::uint64_t evaluations_ = 0;
  std::uint64_t calibrations_ = 0;
  double clock_ = 0.0;
};

struct RestartTrace {
  std::vector<double> start;
  double energy = 0.0;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct VQEResult {
  double energy = 0.0;  // backend expectation re-evaluated at theta
  std::vector<double> theta;
  std::size_t evaluations = 0;
  std::vector<RestartTrace> restarts;
  bool converged = false;
};

// Best of `config.restarts` local minimisations from uniform random angles in
// [-pi, pi). Lowest energy wins; near-ties go to the fewest evaluations.
inline VQEResult minimize(const SpectralDecomposition& d, const Ansatz& ansatz, const Backend& backend,
                          const OptimizerConfig& config) {
  config.validate();
  if (ansatz.qubits() != d.qubits()) {
    throw std::invalid_argument("ansatz acts on " + std::to_string(ansatz.qubits()) +
                                " qubits but the decomposition has " + std::to_string(d.qubits()));
  }
  VQEResult out;
  std::size_t best = 0;
  std::vector<OptimizeResult> results;
  for (std::size_t r = 0; r < config.restarts; ++r) {
    Rng rng(derive_seed(config.seed, {r, 0}));
    std::vector<double> x0(ansatz.parameter_count());
    for (auto& v : x0) v = rng.uniform(-kPi, kPi);

    EnergyEstimator estimator(d, backend, derive_seed(config.seed, {r, 1}));
    Objective objective = [&](std::span<const double> theta) { return estimator.energy(ansatz.prepare(theta)); };
    IterationHook hook = [&](std::size_t it) {
      if (it > 0) estimator.tick();
    };
    auto res = optimize(objective, x0, config, hook);
    out.restarts.push_back({x0, res.f, res.evaluations, res.iterations, res.converged});
    out.evaluations += res.evaluations;
    if (r > 0) {
      const auto& cur = results[best];
      const bool lower = res.f < cur.f - 1e-12;
      const bool tie = std::abs(res.f - cur.f) <= 1e-12 && res.evaluations < cur.evaluations;
      if (lower || tie) best = r;
    }
    results.push_back(std::move(res));
  }

  out.theta = results[best].x;
  out.converged = results[best].converged;
  if (is_exact(backend)) {
    out.energy = exact_expectation(ansatz.prepare(out.theta), d);
  } else {
    EnergyEstimator fresh(d, backend, derive_seed(config.seed, {0xfeedULL}));
    out.energy = fresh.energy(ansatz.prepare(out.theta));
    out.evaluations += 1;
  }
  return out;
}

struct ScanSurface {
  std::vector<double> theta;   // polar nodes over [0, pi]
  std::vector<double> phi;     // azimuthal nodes over [-pi, pi]
  std::vector<double> values;  // row-major, theta index outer
  std::size_t argmin_theta = 0;
  std::size_t argmin_phi = 0;

  double at(std::size_t i, std::size_t j) const { return values[i * phi.size() + j]; }
  double minimum() const { return at(argmin_theta, argmin_phi); }
};

// <H> of the mean-field state at every node of a theta x phi grid, both ends
// inclusive.
inline ScanSurface grid_scan(const SpectralDecomposition& d, std::size_t theta_steps, std::size_t phi_steps,
                             const Backend& backend, std::uint64_t seed = 0) {
  if (d.qubits() != 1) throw std::invalid_argument("grid_scan needs a single-qubit decomposition");
  if (theta_steps < 2 || phi_steps < 2) throw std::invalid_argument("grid needs at least two nodes per axis");
  ScanSurface s;
  for (std::size_t i = 0; i < theta_steps; ++i) s.theta.push_back(kPi * static_cast<double>(i) / static_cast<double>(theta_steps - 1));
  for (std::size_t j = 0; j < phi_steps; ++j) s.phi.push_back(-kPi + 2.0 * kPi * static_cast<double>(j) / static_cast<double>(phi_steps - 1));

  EnergyEstimator estimator(d, backend, seed);
  s.values.reserve(theta_steps * phi_steps);
  double best = INFINITY;
  for (std::size_t i = 0; i < theta_steps; ++i) {
    for (std::size_t j = 0; j < phi_steps; ++j) {
      const auto psi = prepare_meanfield(s.theta[i], s.phi[j]);
      const double e = is_exact(backend) ? exact_expectation(psi, d) : estimator.energy(psi);
      s.values.push_back(e);
      if (e < best) {
        best = e;
        s.argmin_theta = i;
        s.argmin_phi = j;
      }
    }
  }
  return s;
}

struct SpectrumOptions {
  // Extra margin above the Gershgorin bound for the identity shift.
  double shift_margin = 1.0;
  // Explicit shift; replaces the Gershgorin rule when set.
  std::optional<double> shift;
};

struct LevelResult {
  double energy = 0.0;  // shift removed
  VQEResult vqe;
  double residual = 0.0;  // |(H' - e) psi| for the deflated operator the level was found in
  bool zero_captured = false;
};

struct SpectrumResult {
  std::vector<double> energies;     // ascending, shift removed
  std::vector<LevelResult> levels;  // discovery order
  double shift = 0.0;
  bool zero_capture = false;

  bool ok() const { return !zero_capture; }
};

// Shift by s so every eigenvalue is negative, then alternate minimize and
// deflate. A level landing near zero means the optimizer found a deflated
// state instead of a genuine eigenvalue; such levels are flagged.
inline SpectrumResult full_spectrum(const SpectralDecomposition& d, std::size_t levels, const Ansatz& ansatz,
                                    const Backend& backend, const OptimizerConfig& config,
                                    const SpectrumOptions& options = {}) {
  const std::size_t dim = std::size_t{1} << d.qubits();
  if (levels > dim) throw std::invalid_argument("requested more levels than the Hilbert-space dimension");

  SpectrumResult out;
  out.shift = options.shift ? *options.shift : gershgorin_upper_bound(reconstruct_matrix(d)) + options.shift_margin;
  const double capture_window = 0.5 * options.shift_margin;
  SpectralDecomposition current = shift_identity(d, out.shift);

  for (std::size_t level = 0; level < levels; ++level) {
    OptimizerConfig cfg = config;
    cfg.seed = derive_seed(config.seed, {level});
    LevelResult lr;
    lr.vqe = minimize(current, ansatz, backend, cfg);
    const double eps = lr.vqe.energy;
    const auto psi = ansatz.prepare(lr.vqe.theta);

    const Matrix h = reconstruct_matrix(current);
    const Vector v = psi.to_eigen();
    lr.residual = (h * v - eps * v).norm();
    lr.energy = eps + out.shift;
    lr.zero_captured = std::abs(eps) < capture_window;
    out.zero_capture = out.zero_capture || lr.zero_captured;

    if (level + 1 < levels) {
      EnergyEstimator estimator(current, backend, derive_seed(cfg.seed, {0xdef1ULL}));
      current = deflate(std::move(current), eps, estimator.expectations(psi));
    }
    out.levels.push_back(std::move(lr));
  }
  for (const auto& l : out.levels) out.energies.push_back(l.energy);
  std::sort(out.energies.begin(), out.energies.end());
  return out;
}

}  // namespace qbands
