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

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbands {

using complex_t = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Number of qubits needed for a 2^n-dimensional matrix. Requires a power of two.
inline int qubit_count_for_dimension(std::size_t dim) {
  if (!is_power_of_two(dim)) {
    throw std::invalid_argument("dimension " + std::to_string(dim) +
                                " is not a power of two");
  }
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  return n;
}

// Largest entrywise deviation |H - H^dagger|.
inline double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Matrix& m, double tol = 1e-10) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

// Gershgorin row-sum upper bound on the spectrum of a Hermitian matrix:
// max_i (Re H_ii + sum_{j != i} |H_ij|).
inline double gershgorin_upper_bound(const Matrix& m) {
  double bound = -INFINITY;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double row = m(i, i).real();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j != i) row += std::abs(m(i, j));
    }
    bound = std::max(bound, row);
  }
  return bound;
}

inline double gershgorin_lower_bound(const Matrix& m) {
  double bound = INFINITY;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double row = m(i, i).real();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j != i) row -= std::abs(m(i, j));
    }
    bound = std::min(bound, row);
  }
  return bound;
}

// Embeds a square matrix in the next power-of-two dimension. The padded
// diagonal carries `sentinel`, which must exceed every eigenvalue of interest
// so the padding states never enter the low-lying spectrum.
inline Matrix pad_to_power_of_two(const Matrix& m, double sentinel) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  std::size_t dim = 1;
  while (dim < static_cast<std::size_t>(m.rows())) dim <<= 1;
  if (dim == static_cast<std::size_t>(m.rows())) return m;
  Matrix out = Matrix::Zero(dim, dim);
  out.topLeftCorner(m.rows(), m.cols()) = m;
  for (auto i = m.rows(); i < static_cast<Eigen::Index>(dim); ++i) out(i, i) = sentinel;
  return out;
}

}  // namespace qbands
