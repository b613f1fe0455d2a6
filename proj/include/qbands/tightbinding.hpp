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

// Nearest-neighbour sp3 tight-binding model of diamond-lattice silicon.
//
// Basis order: (A: s, px, py, pz, B: s, px, py, pz). Bond vectors from atom A
// to its four B neighbours are d1 = (a/4)(1,1,1), d2 = (a/4)(1,-1,-1),
// d3 = (a/4)(-1,1,-1), d4 = (a/4)(-1,-1,1). Each hopping integral is the full
// four-neighbour matrix element at Gamma, so the structure factors carry 1/4.
// Phases are attached to the bond vectors (atom-centred gauge).

#pragma once

#include "qbands/matrix.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qbands {

struct TBParameters {
  double lattice_constant = 5.431;  // Angstrom
  double E_s = 0.0;
  double E_p = 7.20;
  double V_ss = -8.13;
  double V_sp = 5.88;
  double V_xx = 3.17;
  double V_xy = 7.51;

  void validate() const {
    if (!(lattice_constant > 0.0) || !std::isfinite(lattice_constant)) {
      throw std::invalid_argument("lattice_constant must be positive and finite");
    }
    for (double v : {E_s, E_p, V_ss, V_sp, V_xx, V_xy}) {
      if (!std::isfinite(v)) throw std::invalid_argument("tight-binding energies must be finite");
    }
  }
};

// Wave vector in fractional units of 2*pi/a.
struct KPoint {
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  std::string label;

  KPoint() = default;
  KPoint(double x, double y, double z, std::string name = {})
      : frac{x, y, z}, label(std::move(name)) {
    for (double c : frac) {
      if (!std::isfinite(c)) throw std::invalid_argument("k-point components must be finite");
    }
  }

  // Cartesian wave vector in 1/Angstrom for lattice constant `a`.
  std::array<double, 3> cartesian(double a) const {
    const double scale = 2.0 * kPi / a;
    return {scale * frac[0], scale * frac[1], scale * frac[2]};
  }
};

namespace kpoints {
inline KPoint gamma() { return {0.0, 0.0, 0.0, "G"}; }
inline KPoint X() { return {1.0, 0.0, 0.0, "X"}; }
inline KPoint L() { return {0.5, 0.5, 0.5, "L"}; }
inline KPoint W() { return {1.0, 0.5, 0.0, "W"}; }
inline KPoint K() { return {0.75, 0.75, 0.0, "K"}; }
inline KPoint U() { return {1.0, 0.25, 0.25, "U"}; }
}  // namespace kpoints

struct KPath {
  std::vector<KPoint> points;
  std::vector<std::size_t> segment_starts;  // index of every anchor in `points`
  std::vector<double> coordinate;           // cumulative length, units of 2*pi/a

  std::size_t size() const { return points.size(); }
};

class BlochHamiltonian {
 public:
  BlochHamiltonian() = default;
  explicit BlochHamiltonian(Matrix m, KPoint k = {}) : matrix_(std::move(m)), k_(std::move(k)) {
    if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("Hamiltonian must be square");
    if (!is_power_of_two(static_cast<std::size_t>(matrix_.rows()))) {
      throw std::invalid_argument("Hamiltonian dimension must be a power of two");
    }
  }

  const Matrix& matrix() const { return matrix_; }
  const KPoint& k() const { return k_; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }
  int qubits() const { return qubit_count_for_dimension(dimension()); }

 private:
  Matrix matrix_;
  KPoint k_;
};

namespace detail {

// Sign pattern of the four bond vectors in units of a/4.
inline constexpr std::array<std::array<int, 3>, 4> kBondSigns{{
    {1, 1, 1},
    {1, -1, -1},
    {-1, 1, -1},
    {-1, -1, 1},
}};

// Structure factors g0..g3. g0 is the plain average of the bond phases,
// g1..g3 weight each phase by the x, y, z sign of its bond.
inline std::array<complex_t, 4> structure_factors(const KPoint& k) {
  std::array<complex_t, 4> g{};
  for (const auto& s : kBondSigns) {
    // k.d = (2 pi / a)(a / 4) frac.s
    const double phase = 0.5 * kPi * (k.frac[0] * s[0] + k.frac[1] * s[1] + k.frac[2] * s[2]);
    const complex_t e = std::polar(1.0, phase);
    g[0] += e;
    g[1] += static_cast<double>(s[0]) * e;
    g[2] += static_cast<double>(s[1]) * e;
    g[3] += static_cast<double>(s[2]) * e;
  }
  for (auto& v : g) v *= 0.25;
  return g;
}

}  // namespace detail

inline BlochHamiltonian build_full_hamiltonian(const TBParameters& p, const KPoint& k) {
  p.validate();
  const auto g = detail::structure_factors(k);

  Matrix ab = Matrix::Zero(4, 4);
  ab(0, 0) = p.V_ss * g[0];
  for (int a = 1; a <= 3; ++a) {
    ab(0, a) = p.V_sp * g[a];
    ab(a, 0) = -p.V_sp * g[a];
    ab(a, a) = p.V_xx * g[0];
  }
  // p_a-p_b with a != b couples through the factor of the remaining axis.
  ab(1, 2) = ab(2, 1) = p.V_xy * g[3];
  ab(1, 3) = ab(3, 1) = p.V_xy * g[2];
  ab(2, 3) = ab(3, 2) = p.V_xy * g[1];

  Matrix h = Matrix::Zero(8, 8);
  h(0, 0) = h(4, 4) = p.E_s;
  for (int a = 1; a <= 3; ++a) h(a, a) = h(a + 4, a + 4) = p.E_p;
  h.topRightCorner(4, 4) = ab;
  h.bottomLeftCorner(4, 4) = ab.adjoint();
  return BlochHamiltonian(std::move(h), k);
}

// 2x2 block of the two s orbitals; exact when s-p hopping is neglected.
inline BlochHamiltonian build_s_block(const TBParameters& p, const KPoint& k) {
  p.validate();
  const complex_t off = p.V_ss * detail::structure_factors(k)[0];
  Matrix h(2, 2);
  h << p.E_s, off, std::conj(off), p.E_s;
  return BlochHamiltonian(std::move(h), k);
}

inline KPath make_kpath(const std::vector<KPoint>& anchors, std::size_t points_per_segment) {
  if (anchors.size() < 2) throw std::invalid_argument("a k-path needs at least two anchors");
  if (points_per_segment < 1) throw std::invalid_argument("points_per_segment must be >= 1");

  KPath path;
  path.points.push_back(anchors.front());
  path.coordinate.push_back(0.0);
  path.segment_starts.push_back(0);
  for (std::size_t seg = 0; seg + 1 < anchors.size(); ++seg) {
    const auto& from = anchors[seg];
    const auto& to = anchors[seg + 1];
    for (std::size_t i = 1; i <= points_per_segment; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(points_per_segment);
      KPoint k(from.frac[0] + t * (to.frac[0] - from.frac[0]),
               from.frac[1] + t * (to.frac[1] - from.frac[1]),
               from.frac[2] + t * (to.frac[2] - from.frac[2]));
      if (i == points_per_segment) {
        k.frac = to.frac;
        k.label = to.label;
      }
      const auto& prev = path.points.back().frac;
      const double step = std::hypot(k.frac[0] - prev[0], k.frac[1] - prev[1], k.frac[2] - prev[2]);
      path.coordinate.push_back(path.coordinate.back() + step);
      path.points.push_back(std::move(k));
    }
    path.segment_starts.push_back(path.points.size() - 1);
  }
  return path;
}

struct EigenSystem {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j belongs to values[j]
};

inline EigenSystem eigen_decompose(const Matrix& h, double hermitian_tol = 1e-10) {
  if (!is_hermitian(h, hermitian_tol)) {
    throw std::invalid_argument("matrix is not Hermitian within tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  EigenSystem out;
  out.values.assign(solver.eigenvalues().data(),
                    solver.eigenvalues().data() + solver.eigenvalues().size());
  out.vectors = solver.eigenvectors();
  return out;
}

// Reference spectrum by dense diagonalization, ascending with multiplicity.
inline std::vector<double> diagonalize_classical(const Matrix& h, double hermitian_tol = 1e-10) {
  if (!is_hermitian(h, hermitian_tol)) {
    throw std::invalid_argument("matrix is not Hermitian within tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

inline std::vector<double> diagonalize_classical(const BlochHamiltonian& h) {
  return diagonalize_classical(h.matrix());
}

}  // namespace qbands
