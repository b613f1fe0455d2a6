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

// Exact statevector simulation: gates, the two variational forms and
// analytic Pauli expectation values.

#pragma once

#include "qbands/matrix.hpp"
#include "qbands/pauli.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qbands {

enum class GateKind { RY, RZ, H, S, Z, X, CNOT };

// Qubit indices are 1-based; qubit q acts on bit q-1 of the basis index.
struct Gate {
  GateKind kind = GateKind::X;
  int target = 1;
  int control = 0;  // CNOT only
  double angle = 0.0;

  static Gate ry(int q, double theta) { return {GateKind::RY, q, 0, theta}; }
  static Gate rz(int q, double phi) { return {GateKind::RZ, q, 0, phi}; }
  static Gate h(int q) { return {GateKind::H, q, 0, 0.0}; }
  static Gate s(int q) { return {GateKind::S, q, 0, 0.0}; }
  static Gate z(int q) { return {GateKind::Z, q, 0, 0.0}; }
  static Gate x(int q) { return {GateKind::X, q, 0, 0.0}; }
  static Gate cnot(int control, int target) { return {GateKind::CNOT, target, control, 0.0}; }
};

// 2x2 unitary of a single-qubit gate, row-major {u00, u01, u10, u11}.
// RY(t) = exp(-i t Y / 2), RZ(p) = exp(-i p Z / 2).
inline std::array<complex_t, 4> gate_unitary(const Gate& g) {
  const double r2 = 1.0 / std::sqrt(2.0);
  switch (g.kind) {
    case GateKind::RY: {
      const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
      return {complex_t{c}, complex_t{-s}, complex_t{s}, complex_t{c}};
    }
    case GateKind::RZ:
      return {std::polar(1.0, -g.angle / 2), 0.0, 0.0, std::polar(1.0, g.angle / 2)};
    case GateKind::H: return {r2, r2, r2, -r2};
    case GateKind::S: return {1.0, 0.0, 0.0, complex_t{0.0, 1.0}};
    case GateKind::Z: return {1.0, 0.0, 0.0, -1.0};
    case GateKind::X: return {0.0, 1.0, 1.0, 0.0};
    case GateKind::CNOT: break;
  }
  throw std::invalid_argument("CNOT has no single-qubit unitary");
}

class StateVector {
 public:
  StateVector() = default;

  // |0...0> on n qubits.
  explicit StateVector(int n) : n_(n), amps_(dimension_for(n), 0.0) { amps_[0] = 1.0; }

  StateVector(int n, std::vector<complex_t> amplitudes) : n_(n), amps_(std::move(amplitudes)) {
    if (amps_.size() != dimension_for(n)) throw std::invalid_argument("amplitude count must be 2^n");
  }

  static StateVector basis(int n, std::uint32_t index) {
    StateVector s(n);
    s.amps_.at(0) = 0.0;
    s.amps_.at(index) = 1.0;
    return s;
  }

  int qubits() const { return n_; }
  std::size_t dimension() const { return amps_.size(); }
  const std::vector<complex_t>& amplitudes() const { return amps_; }
  complex_t operator[](std::size_t i) const { return amps_[i]; }

  double norm() const {
    double acc = 0.0;
    for (const auto& a : amps_) acc += std::norm(a);
    return std::sqrt(acc);
  }

  double probability(std::size_t i) const { return std::norm(amps_[i]); }

  void apply(const Gate& g) {
    check_qubit(g.target);
    const std::size_t tbit = std::size_t{1} << (g.target - 1);
    if (g.kind == GateKind::CNOT) {
      check_qubit(g.control);
      if (g.control == g.target) throw std::invalid_argument("CNOT control equals target");
      const std::size_t cbit = std::size_t{1} << (g.control - 1);
      for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & cbit) && !(i & tbit)) std::swap(amps_[i], amps_[i | tbit]);
      }
      return;
    }
    const auto u = gate_unitary(g);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (i & tbit) continue;
      const complex_t a0 = amps_[i];
      const complex_t a1 = amps_[i | tbit];
      amps_[i] = u[0] * a0 + u[1] * a1;
      amps_[i | tbit] = u[2] * a0 + u[3] * a1;
    }
  }

  void apply(std::span<const Gate> gates) {
    for (const auto& g : gates) apply(g);
  }

  void scale(complex_t factor) {
    for (auto& a : amps_) a *= factor;
  }

  Vector to_eigen() const {
    Vector v(static_cast<Eigen::Index>(amps_.size()));
    for (std::size_t i = 0; i < amps_.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps_[i];
    return v;
  }

 private:
  static std::size_t dimension_for(int n) {
    if (n < 1 || n > kMaxQubits) throw std::invalid_argument("unsupported qubit count");
    return std::size_t{1} << n;
  }
  void check_qubit(int q) const {
    if (q < 1 || q > n_) {
      throw std::out_of_range("qubit index " + std::to_string(q) + " outside [1, " +
                              std::to_string(n_) + "]");
    }
  }

  int n_ = 0;
  std::vector<complex_t> amps_;
};

inline StateVector apply_gate(StateVector state, const Gate& g) {
  state.apply(g);
  return state;
}

// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>, realised as RZ(phi) RY(theta)|0>
// followed by the global phase e^{i phi/2}.
inline StateVector prepare_meanfield(double theta, double phi) {
  StateVector s(1);
  s.apply(Gate::ry(1, theta));
  s.apply(Gate::rz(1, phi));
  s.scale(std::polar(1.0, phi / 2));
  // the phase product leaves ~1e-17 of imaginary dust on the |0> amplitude
  return StateVector(1, {complex_t(s[0].real(), 0.0), s[1]});
}

enum class AnsatzKind { MeanField, ThreeQubit };

// Layers of the three-qubit form used unless a caller asks otherwise. Two
// layers (12 angles) span only a 12-dimensional family of states, which
// misses generic eigenvectors of an 8x8 Hermitian matrix; three layers reach
// them.
inline constexpr int kDefaultThreeQubitLayers = 3;

class Ansatz {
 public:
  explicit Ansatz(AnsatzKind kind, int layers = kDefaultThreeQubitLayers) : kind_(kind), layers_(layers) {
    if (kind_ == AnsatzKind::MeanField) layers_ = 1;
    if (layers_ < 1) throw std::invalid_argument("ansatz needs at least one layer");
  }

  static Ansatz mean_field() { return Ansatz(AnsatzKind::MeanField); }
  static Ansatz three_qubit(int layers = kDefaultThreeQubitLayers) { return Ansatz(AnsatzKind::ThreeQubit, layers); }

  // Natural ansatz for an n-qubit problem.
  static Ansatz for_qubits(int n, int layers = kDefaultThreeQubitLayers) {
    if (n == 1) return mean_field();
    if (n == 3) return three_qubit(layers);
    throw std::invalid_argument("no ansatz for " + std::to_string(n) + " qubits");
  }

  AnsatzKind kind() const { return kind_; }
  int layers() const { return layers_; }
  int qubits() const { return kind_ == AnsatzKind::MeanField ? 1 : 3; }
  std::size_t parameter_count() const {
    return kind_ == AnsatzKind::MeanField ? 2 : 6 * static_cast<std::size_t>(layers_);
  }
  std::string name() const { return kind_ == AnsatzKind::MeanField ? "mean-field" : "three-qubit"; }

  // Each layer is RY(q1..q3), RZ(q1..q3), CNOT(1->2), CNOT(2->3); parameters
  // fill the rotations in that order. The mean-field form is RY then RZ.
  std::vector<Gate> circuit(std::span<const double> theta) const {
    check_count(theta.size());
    std::vector<Gate> gates;
    if (kind_ == AnsatzKind::MeanField) {
      gates = {Gate::ry(1, theta[0]), Gate::rz(1, theta[1])};
      return gates;
    }
    for (int layer = 0; layer < layers_; ++layer) {
      const auto* p = theta.data() + 6 * layer;
      for (int q = 1; q <= 3; ++q) gates.push_back(Gate::ry(q, p[q - 1]));
      for (int q = 1; q <= 3; ++q) gates.push_back(Gate::rz(q, p[q + 2]));
      gates.push_back(Gate::cnot(1, 2));
      gates.push_back(Gate::cnot(2, 3));
    }
    return gates;
  }

  StateVector prepare(std::span<const double> theta) const {
    if (kind_ == AnsatzKind::MeanField) {
      check_count(theta.size());
      return prepare_meanfield(theta[0], theta[1]);
    }
    StateVector s(3);
    s.apply(circuit(theta));
    return s;
  }

 private:
  void check_count(std::size_t got) const {
    if (got != parameter_count()) {
      throw std::invalid_argument(name() + " ansatz takes " + std::to_string(parameter_count()) +
                                  " parameters, got " + std::to_string(got));
    }
  }

  AnsatzKind kind_;
  int layers_ = kDefaultThreeQubitLayers;
};

inline StateVector prepare_three_qubit(std::span<const double> theta, int layers = kDefaultThreeQubitLayers) {
  return Ansatz::three_qubit(layers).prepare(theta);
}

// <psi| sigma |psi>; real for any Pauli word.
inline double pauli_expectation(const StateVector& psi, const PauliWord& w) {
  if (w.qubits() != psi.qubits()) throw std::invalid_argument("word and state sizes differ");
  const auto& a = psi.amplitudes();
  complex_t acc = 0.0;
  for (std::uint32_t r = 0; r < a.size(); ++r) acc += std::conj(a[r ^ w.x_mask()]) * w.phase(r) * a[r];
  return acc.real();
}

// Sum_i c_i <sigma_i>.
inline double exact_expectation(const StateVector& psi, const SpectralDecomposition& d) {
  if (d.qubits() != psi.qubits()) throw std::invalid_argument("decomposition and state sizes differ");
  double e = 0.0;
  for (const auto& [w, c] : d.terms()) e += c * pauli_expectation(psi, w);
  return e;
}

inline PauliExpectations exact_pauli_expectations(const StateVector& psi) {
  PauliExpectations out(psi.qubits());
  for (std::size_t i = 0; i < pauli_basis_size(psi.qubits()); ++i) {
    const auto w = PauliWord::from_index(psi.qubits(), i);
    out.set(w, pauli_expectation(psi, w));
  }
  return out;
}

}  // namespace qbands
