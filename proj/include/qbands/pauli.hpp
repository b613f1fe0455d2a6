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

// Pauli words and the spectral (Pauli-basis) decomposition of Hermitian
// matrices.
//
// Qubit convention: qubit q (1-based) is bit q-1 of a basis index, and in a
// word's string form position 1 is the rightmost letter. "IZZIZ" therefore
// reads I5 Z4 Z3 I2 Z1.

#pragma once

#include "qbands/matrix.hpp"
#include "qbands/tightbinding.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qbands {

inline constexpr int kMaxQubits = 12;

class PauliWord {
 public:
  PauliWord() = default;

  // Identity on n qubits.
  explicit PauliWord(int n) : n_(n) { check_size(n); }

  PauliWord(int n, std::uint32_t x_mask, std::uint32_t z_mask) : n_(n), x_(x_mask), z_(z_mask) {
    check_size(n);
    const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1u);
    if ((x_ & ~full) != 0 || (z_ & ~full) != 0) {
      throw std::invalid_argument("Pauli mask has bits beyond the qubit count");
    }
  }

  static PauliWord parse(std::string_view text) {
    const int n = static_cast<int>(text.size());
    PauliWord w(n);
    for (int q = 0; q < n; ++q) {
      const char c = text[static_cast<std::size_t>(n - 1 - q)];
      switch (c) {
        case 'I': break;
        case 'X': w.x_ |= 1u << q; break;
        case 'Y': w.x_ |= 1u << q; w.z_ |= 1u << q; break;
        case 'Z': w.z_ |= 1u << q; break;
        default: throw std::invalid_argument(std::string("invalid Pauli letter '") + c + "'");
      }
    }
    return w;
  }

  // Base-4 enumeration with digit (I,X,Y,Z) = (0,1,2,3); qubit 1 is the
  // least significant digit.
  static PauliWord from_index(int n, std::size_t index) {
    PauliWord w(n);
    for (int q = 0; q < n; ++q) {
      switch ((index >> (2 * q)) & 3u) {
        case 1: w.x_ |= 1u << q; break;
        case 2: w.x_ |= 1u << q; w.z_ |= 1u << q; break;
        case 3: w.z_ |= 1u << q; break;
        default: break;
      }
    }
    return w;
  }

  std::size_t index() const {
    std::size_t idx = 0;
    for (int q = 0; q < n_; ++q) {
      const bool x = (x_ >> q) & 1u;
      const bool z = (z_ >> q) & 1u;
      const std::size_t digit = x ? (z ? 2 : 1) : (z ? 3 : 0);
      idx |= digit << (2 * q);
    }
    return idx;
  }

  int qubits() const { return n_; }
  std::uint32_t x_mask() const { return x_; }
  std::uint32_t z_mask() const { return z_; }

  // Letter on 1-based qubit q.
  char letter(int q) const {
    const bool x = (x_ >> (q - 1)) & 1u;
    const bool z = (z_ >> (q - 1)) & 1u;
    return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
  }

  bool is_identity() const { return x_ == 0 && z_ == 0; }
  bool is_diagonal() const { return x_ == 0; }
  int weight() const { return std::popcount(x_ | z_); }

  std::string str() const {
    std::string s(static_cast<std::size_t>(n_), 'I');
    for (int q = 1; q <= n_; ++q) s[static_cast<std::size_t>(n_ - q)] = letter(q);
    return s;
  }

  // sigma |r> = phase(r) |r ^ x_mask>.
  complex_t phase(std::uint32_t r) const {
    static constexpr complex_t kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const int ys = std::popcount(x_ & z_);
    const int sign = std::popcount(r & z_) & 1;
    return kIPow[(ys + 2 * sign) & 3];
  }

  Matrix matrix() const {
    const std::size_t dim = std::size_t{1} << n_;
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::uint32_t r = 0; r < dim; ++r) m(r ^ x_, r) = phase(r);
    return m;
  }

  friend bool operator==(const PauliWord&, const PauliWord&) = default;
  friend bool operator<(const PauliWord& a, const PauliWord& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    return a.index() < b.index();
  }

 private:
  static void check_size(int n) {
    if (n < 0 || n > kMaxQubits) throw std::invalid_argument("unsupported qubit count");
  }

  int n_ = 0;
  std::uint32_t x_ = 0;
  std::uint32_t z_ = 0;
};

inline std::size_t pauli_basis_size(int n) { return std::size_t{1} << (2 * n); }

// Tr(H^dagger sigma) without forming sigma.
inline complex_t pauli_trace(const Matrix& h, const PauliWord& w) {
  const std::uint32_t dim = static_cast<std::uint32_t>(h.rows());
  complex_t acc = 0.0;
  for (std::uint32_t r = 0; r < dim; ++r) acc += std::conj(h(r ^ w.x_mask(), r)) * w.phase(r);
  return acc;
}

// Real coefficients over all 4^n words of an n-qubit system.
class SpectralDecomposition {
 public:
  SpectralDecomposition() = default;
  explicit SpectralDecomposition(int n, std::optional<KPoint> k = std::nullopt)
      : n_(n), coeffs_(pauli_basis_size(n), 0.0), k_(std::move(k)) {}

  int qubits() const { return n_; }
  const std::optional<KPoint>& k() const { return k_; }
  void set_k(std::optional<KPoint> k) { k_ = std::move(k); }

  double operator[](const PauliWord& w) const { return coeffs_.at(checked(w).index()); }
  double coefficient(const PauliWord& w) const { return (*this)[w]; }
  void set(const PauliWord& w, double c) {
    if (!std::isfinite(c)) throw std::invalid_argument("Pauli coefficient must be finite");
    coeffs_.at(checked(w).index()) = c;
  }
  void add(const PauliWord& w, double c) { set(w, coefficient(w) + c); }

  double identity_coefficient() const { return coeffs_.empty() ? 0.0 : coeffs_[0]; }

  // Dense coefficient table indexed by PauliWord::index().
  const std::vector<double>& dense() const { return coeffs_; }

  std::vector<std::pair<PauliWord, double>> terms() const {
    std::vector<std::pair<PauliWord, double>> out;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (coeffs_[i] != 0.0) out.emplace_back(PauliWord::from_index(n_, i), coeffs_[i]);
    }
    return out;
  }

  std::size_t nonzero_count() const {
    std::size_t c = 0;
    for (double v : coeffs_) c += v != 0.0;
    return c;
  }

 private:
  const PauliWord& checked(const PauliWord& w) const {
    if (w.qubits() != n_) throw std::invalid_argument("Pauli word length does not match decomposition");
    return w;
  }

  int n_ = 0;
  std::vector<double> coeffs_;
  std::optional<KPoint> k_;
};

// Expectation values <sigma_i> for every word; entries left unset are NaN.
class PauliExpectations {
 public:
  PauliExpectations() = default;
  explicit PauliExpectations(int n)
      : n_(n), values_(pauli_basis_size(n), std::numeric_limits<double>::quiet_NaN()) {}

  int qubits() const { return n_; }
  void set(const PauliWord& w, double v) { values_.at(checked(w).index()) = v; }
  double operator[](const PauliWord& w) const { return values_.at(checked(w).index()); }
  bool has(const PauliWord& w) const { return !std::isnan((*this)[w]); }
  const std::vector<double>& dense() const { return values_; }

 private:
  const PauliWord& checked(const PauliWord& w) const {
    if (w.qubits() != n_) throw std::invalid_argument("Pauli word length does not match expectations");
    return w;
  }

  int n_ = 0;
  std::vector<double> values_;
};

inline constexpr double kCoefficientCutoff = 1e-14;

inline SpectralDecomposition decompose(const Matrix& h, std::optional<KPoint> k = std::nullopt) {
  if (h.rows() != h.cols()) throw std::invalid_argument("matrix is not square");
  const int n = qubit_count_for_dimension(static_cast<std::size_t>(h.rows()));
  const double norm = 1.0 / static_cast<double>(h.rows());
  SpectralDecomposition out(n, std::move(k));
  for (std::size_t i = 0; i < pauli_basis_size(n); ++i) {
    const auto w = PauliWord::from_index(n, i);
    const double c = pauli_trace(h, w).real() * norm;
    if (std::abs(c) >= kCoefficientCutoff) out.set(w, c);
  }
  return out;
}

inline SpectralDecomposition decompose(const BlochHamiltonian& h) {
  return decompose(h.matrix(), h.k());
}

inline Matrix reconstruct_matrix(const SpectralDecomposition& d) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << d.qubits());
  Matrix m = Matrix::Zero(dim, dim);
  for (const auto& [w, c] : d.terms()) {
    for (std::uint32_t r = 0; r < static_cast<std::uint32_t>(dim); ++r) {
      m(r ^ w.x_mask(), r) += c * w.phase(r);
    }
  }
  return m;
}

inline BlochHamiltonian reconstruct(const SpectralDecomposition& d) {
  return BlochHamiltonian(reconstruct_matrix(d), d.k().value_or(KPoint{}));
}

// Lowers every eigenvalue by `s`; only the identity coefficient changes.
inline SpectralDecomposition shift_identity(SpectralDecomposition d, double s) {
  const PauliWord id(d.qubits());
  d.set(id, d[id] - s);
  return d;
}

// H' = H - e0 |psi0><psi0|, i.e. c'_i = c_i - e0 <sigma_i> / 2^n for every word.
// `expectations` must be measured in the state that produced e0.
inline SpectralDecomposition deflate(SpectralDecomposition d, double e0,
                                     const PauliExpectations& expectations) {
  if (e0 == 0.0) return d;
  if (expectations.qubits() != d.qubits()) {
    throw std::invalid_argument("expectation table size does not match decomposition");
  }
  const double scale = e0 / static_cast<double>(std::size_t{1} << d.qubits());
  for (std::size_t i = 0; i < pauli_basis_size(d.qubits()); ++i) {
    const auto w = PauliWord::from_index(d.qubits(), i);
    const double v = expectations[w];
    if (std::isnan(v)) throw std::invalid_argument("missing expectation for word " + w.str());
    const double c = d[w] - scale * v;
    d.set(w, std::abs(c) < kCoefficientCutoff ? 0.0 : c);
  }
  return d;
}

}  // namespace qbands
