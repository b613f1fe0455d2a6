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

// Shot-based measurement: basis changes, bitstring sampling with classical
// readout flips, parity estimators, transition-rate estimation and readout
// mitigation.

#pragma once

#include "qbands/pauli.hpp"
#include "qbands/qsim.hpp"
#include "qbands/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbands {

class BitstringCounts {
 public:
  BitstringCounts() = default;
  explicit BitstringCounts(int n, std::uint64_t seed = 0) : n_(n), seed_(seed) {}

  void add(std::uint32_t bits, std::uint64_t count = 1) {
    if (n_ < 32 && (bits >> n_) != 0) throw std::invalid_argument("bitstring longer than qubit count");
    counts_[bits] += count;
    total_ += count;
  }

  int qubits() const { return n_; }
  std::uint64_t shots() const { return total_; }
  std::uint64_t seed() const { return seed_; }
  const std::map<std::uint32_t, std::uint64_t>& counts() const { return counts_; }

  std::uint64_t count(std::uint32_t bits) const {
    auto it = counts_.find(bits);
    return it == counts_.end() ? 0 : it->second;
  }
  double probability(std::uint32_t bits) const {
    return total_ == 0 ? 0.0 : static_cast<double>(count(bits)) / static_cast<double>(total_);
  }

  // Qubit n leftmost, qubit 1 rightmost.
  std::string label(std::uint32_t bits) const {
    std::string s(static_cast<std::size_t>(n_), '0');
    for (int q = 0; q < n_; ++q) {
      if ((bits >> q) & 1u) s[static_cast<std::size_t>(n_ - 1 - q)] = '1';
    }
    return s;
  }

  static std::uint32_t parse_label(const std::string& s) {
    std::uint32_t bits = 0;
    for (char c : s) {
      if (c != '0' && c != '1') throw std::invalid_argument("bitstring must contain only 0/1");
      bits = (bits << 1) | static_cast<std::uint32_t>(c == '1');
    }
    return bits;
  }

  void write_csv(std::ostream& os) const {
    os << "bitstring,count\n";
    for (const auto& [bits, c] : counts_) os << label(bits) << ',' << c << '\n';
  }

 private:
  int n_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t total_ = 0;
  std::map<std::uint32_t, std::uint64_t> counts_;
};

struct QubitRates {
  double w01 = 0.0;  // P(read 1 | prepared 0)
  double w10 = 0.0;  // P(read 0 | prepared 1)

  double p_plus() const { return w10 + w01; }
  double p_minus() const { return w10 - w01; }
};

struct RateDrift {
  double amplitude = 0.0;
  double period = 1.0;  // in trial-clock units
};

// Independent per-qubit readout flips. A single entry applies to every qubit.
class ReadoutNoiseModel {
 public:
  ReadoutNoiseModel() = default;
  explicit ReadoutNoiseModel(std::vector<QubitRates> rates, std::optional<RateDrift> drift = std::nullopt)
      : rates_(std::move(rates)), drift_(drift) {
    for (const auto& r : rates_) {
      if (!(r.w01 >= 0.0 && r.w01 <= 1.0 && r.w10 >= 0.0 && r.w10 <= 1.0)) {
        throw std::invalid_argument("transition rates must lie in [0, 1]");
      }
    }
    if (drift_ && !(drift_->period > 0.0)) throw std::invalid_argument("drift period must be positive");
  }

  static ReadoutNoiseModel uniform(double w01, double w10) { return ReadoutNoiseModel({{w01, w10}}); }
  static ReadoutNoiseModel noiseless() { return ReadoutNoiseModel(); }

  bool empty() const { return rates_.empty(); }
  std::size_t size() const { return rates_.size(); }
  const std::vector<QubitRates>& rates() const { return rates_; }
  const std::optional<RateDrift>& drift() const { return drift_; }
  bool has_drift() const { return drift_.has_value() && drift_->amplitude != 0.0; }

  // Rates for 1-based qubit q at trial clock `time`; drift modulates w10 only.
  QubitRates at(int q, double time = 0.0) const {
    if (rates_.empty()) return {};
    const auto idx = rates_.size() == 1 ? 0 : static_cast<std::size_t>(q - 1);
    if (idx >= rates_.size()) throw std::out_of_range("noise model has no entry for qubit " + std::to_string(q));
    QubitRates r = rates_[idx];
    if (drift_) r.w10 = std::clamp(r.w10 + drift_->amplitude * std::sin(2.0 * kPi * time / drift_->period), 0.0, 1.0);
    return r;
  }

  // Drift-free snapshot of the rates seen at `time`.
  ReadoutNoiseModel snapshot(int n, double time) const {
    std::vector<QubitRates> out;
    for (int q = 1; q <= n; ++q) out.push_back(at(q, time));
    return ReadoutNoiseModel(std::move(out));
  }

  bool mitigable() const {
    return std::all_of(rates_.begin(), rates_.end(), [](const QubitRates& r) { return r.p_plus() < 1.0; });
  }

 private:
  std::vector<QubitRates> rates_;
  std::optional<RateDrift> drift_;
};

struct MeasurementBasisChange {
  PauliWord source;
  PauliWord diagonal;       // X and Y replaced by Z
  std::vector<Gate> gates;  // circuit order
};

// X -> H; Y -> Z, S, H in circuit order, i.e. U = H S Z, so that U^dagger Z U
// reproduces the source letter.
inline MeasurementBasisChange basis_change(const PauliWord& word) {
  MeasurementBasisChange out{word, PauliWord(word.qubits(), 0, word.x_mask() | word.z_mask()), {}};
  for (int q = 1; q <= word.qubits(); ++q) {
    switch (word.letter(q)) {
      case 'X': out.gates.push_back(Gate::h(q)); break;
      case 'Y':
        out.gates.push_back(Gate::z(q));
        out.gates.push_back(Gate::s(q));
        out.gates.push_back(Gate::h(q));
        break;
      default: break;
    }
  }
  return out;
}

// Draws `shots` bitstrings from |amplitude|^2 and applies readout flips.
inline BitstringCounts sample(const StateVector& state, std::uint64_t shots,
                              const std::optional<ReadoutNoiseModel>& noise, std::uint64_t seed,
                              double time = 0.0) {
  if (shots < 1) throw std::invalid_argument("shot count must be >= 1");
  const int n = state.qubits();
  std::vector<double> cdf(state.dimension());
  double acc = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) cdf[i] = (acc += state.probability(i));

  std::vector<QubitRates> rates;
  const bool noisy = noise && !noise->empty();
  if (noisy) {
    for (int q = 1; q <= n; ++q) rates.push_back(noise->at(q, time));
  }

  Rng rng(seed);
  std::vector<std::uint64_t> hist(state.dimension(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    auto bits = static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
    if (noisy) {
      for (int q = 0; q < n; ++q) {
        const bool one = (bits >> q) & 1u;
        const double w = one ? rates[q].w10 : rates[q].w01;
        if (rng.uniform() < w) bits ^= 1u << q;
      }
    }
    ++hist[bits];
  }
  BitstringCounts out(n, seed);
  for (std::uint32_t b = 0; b < hist.size(); ++b) {
    if (hist[b] != 0) out.add(b, hist[b]);
  }
  return out;
}

// Sum_z p(z) (-1)^{parity of z restricted to the Z positions of `word`}.
inline double expectation_from_counts(const BitstringCounts& counts, const PauliWord& word) {
  if (!word.is_diagonal()) throw std::invalid_argument("word " + word.str() + " is not diagonal; apply basis_change first");
  if (word.qubits() != counts.qubits()) throw std::invalid_argument("word and counts sizes differ");
  if (counts.shots() == 0) throw std::invalid_argument("no shots recorded");
  std::int64_t acc = 0;
  for (const auto& [bits, c] : counts.counts()) {
    const bool odd = std::popcount(bits & word.z_mask()) & 1;
    acc += odd ? -static_cast<std::int64_t>(c) : static_cast<std::int64_t>(c);
  }
  return static_cast<double>(acc) / static_cast<double>(counts.shots());
}

// Empirical (w01, w10) per qubit from `trials` preparations of |0...0> and,
// via X on every qubit, of |1...1>.
inline ReadoutNoiseModel estimate_transition_rates(int n, const std::optional<ReadoutNoiseModel>& noise,
                                                   std::uint64_t trials, std::uint64_t seed,
                                                   double time = 0.0) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  StateVector zeros(n);
  StateVector ones(n);
  for (int q = 1; q <= n; ++q) ones.apply(Gate::x(q));
  const auto c0 = sample(zeros, trials, noise, derive_seed(seed, {0}), time);
  const auto c1 = sample(ones, trials, noise, derive_seed(seed, {1}), time);

  std::vector<QubitRates> rates(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    std::uint64_t flipped0 = 0, flipped1 = 0;
    for (const auto& [bits, c] : c0.counts()) flipped0 += ((bits >> q) & 1u) ? c : 0;
    for (const auto& [bits, c] : c1.counts()) flipped1 += ((bits >> q) & 1u) ? 0 : c;
    rates[static_cast<std::size_t>(q)] = {static_cast<double>(flipped0) / static_cast<double>(trials),
                                          static_cast<double>(flipped1) / static_cast<double>(trials)};
  }
  return ReadoutNoiseModel(std::move(rates));
}

inline double mitigate_single(double measured, const QubitRates& r) {
  if (r.p_plus() >= 1.0) throw std::domain_error("readout mitigation ill-posed: w01 + w10 >= 1");
  return std::clamp((measured - r.p_minus()) / (1.0 - r.p_plus()), -1.0, 1.0);
}

// Sum_z p(z) prod_{i in Z positions} ((-1)^{z_i} - p-_i) / (1 - p+_i).
inline double mitigate_counts(const BitstringCounts& counts, const ReadoutNoiseModel& model,
                              const PauliWord& word) {
  if (!word.is_diagonal()) throw std::invalid_argument("word " + word.str() + " is not diagonal");
  if (word.qubits() != counts.qubits()) throw std::invalid_argument("word and counts sizes differ");
  if (counts.shots() == 0) throw std::invalid_argument("no shots recorded");
  std::vector<QubitRates> rates;
  for (int q = 1; q <= word.qubits(); ++q) {
    rates.push_back(model.at(q));
    if (((word.z_mask() >> (q - 1)) & 1u) && rates.back().p_plus() >= 1.0) {
      throw std::domain_error("readout mitigation ill-posed on qubit " + std::to_string(q));
    }
  }
  double acc = 0.0;
  for (const auto& [bits, c] : counts.counts()) {
    double term = 1.0;
    for (int q = 0; q < word.qubits(); ++q) {
      if (!((word.z_mask() >> q) & 1u)) continue;
      const auto& r = rates[static_cast<std::size_t>(q)];
      const double eig = ((bits >> q) & 1u) ? -1.0 : 1.0;
      term *= (eig - r.p_minus()) / (1.0 - r.p_plus());
    }
    acc += static_cast<double>(c) * term;
  }
  return std::clamp(acc / static_cast<double>(counts.shots()), -1.0, 1.0);
}

// One word measured in its own circuit: basis change, sampling, parity and
// optional mitigation with `mitigation` as the assumed rates.
inline double estimate_pauli(const StateVector& state, const PauliWord& word, std::uint64_t shots,
                             const std::optional<ReadoutNoiseModel>& noise,
                             const std::optional<ReadoutNoiseModel>& mitigation, std::uint64_t seed,
                             double time = 0.0) {
  if (word.is_identity()) return 1.0;
  const auto change = basis_change(word);
  StateVector rotated = state;
  rotated.apply(change.gates);
  const auto counts = sample(rotated, shots, noise, seed, time);
  if (mitigation && !mitigation->empty()) return mitigate_counts(counts, *mitigation, change.diagonal);
  return expectation_from_counts(counts, change.diagonal);
}

}  // namespace qbands
