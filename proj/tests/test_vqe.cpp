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

#include "oracles.hpp"
#include "qbands/tightbinding.hpp"
#include "qbands/vqe.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace qbands;
using Catch::Approx;

namespace {

SpectralDecomposition single(const char* word, double c) {
  SpectralDecomposition d(PauliWord::parse(word).qubits());
  d.set(PauliWord::parse(word), c);
  return d;
}

OptimizerConfig exact_config(std::size_t restarts) {
  OptimizerConfig c;
  c.restarts = restarts;
  return c;
}

std::array<double, 3> bloch(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

// Random Hermitian with a prescribed spectrum.
Matrix with_spectrum(const std::vector<double>& ev, std::mt19937_64& g) {
  const int dim = static_cast<int>(ev.size());
  Eigen::HouseholderQR<Matrix> qr(oracle::random_hermitian(dim, g) + Matrix::Identity(dim, dim) * complex_t(0, 1));
  const Matrix q = qr.householderQ();
  Vector diag(dim);
  for (int i = 0; i < dim; ++i) diag(i) = ev[static_cast<std::size_t>(i)];
  const Matrix h = q * diag.asDiagonal() * q.adjoint();
  return 0.5 * (h + h.adjoint());
}

}  // namespace

TEST_CASE("minimize on a single Z") {
  const auto r = minimize(single("Z", 1.0), Ansatz::mean_field(), ExactBackend{}, exact_config(3));
  CHECK(r.energy == Approx(-1.0).margin(1e-9));
  CHECK(std::abs(std::cos(r.theta[0] / 2)) < 1e-4);
  CHECK(r.restarts.size() == 3);
  CHECK(r.converged);
  CHECK(r.evaluations == [&] {
    std::size_t n = 0;
    for (const auto& t : r.restarts) n += t.evaluations;
    return n;
  }());
}

TEST_CASE("minimize rejects a mismatched ansatz") {
  CHECK_THROWS_AS(minimize(single("ZZZ", 1.0), Ansatz::mean_field(), ExactBackend{}, exact_config(1)),
                  std::invalid_argument);
}

TEST_CASE("minimize reproduces the s-block ground state at Gamma") {
  const TBParameters p;
  const auto d = decompose(build_s_block(p, kpoints::gamma()));
  const auto r = minimize(d, Ansatz::mean_field(), ExactBackend{}, exact_config(3));
  CHECK(r.energy == Approx(p.E_s - std::abs(p.V_ss)).margin(1e-8));
}

TEST_CASE("minimize finds the ground state of the full Hamiltonian at Gamma") {
  const TBParameters p;
  const auto h = build_full_hamiltonian(p, kpoints::gamma());
  const auto oracle_ev = oracle::jacobi_eigenvalues(h.matrix());
  const auto d = decompose(h);
  const double s = gershgorin_upper_bound(h.matrix()) + 1.0;
  const auto r = minimize(shift_identity(d, s), Ansatz::three_qubit(), ExactBackend{}, exact_config(20));
  CHECK(r.energy + s == Approx(oracle_ev.front()).margin(1e-3));
}

TEST_CASE("variational bound on the exact backend") {
  std::mt19937_64 g(303);
  for (int trial = 0; trial < 10; ++trial) {
    const auto h = oracle::random_hermitian(2, g, 3.0);
    const double lowest = oracle::jacobi_eigenvalues(h).front();
    auto cfg = exact_config(1);
    cfg.seed = static_cast<std::uint64_t>(trial);
    cfg.max_iter = 3;
    const auto r = minimize(decompose(h), Ansatz::mean_field(), ExactBackend{}, cfg);
    CHECK(r.energy >= lowest - 1e-9);
  }
}

TEST_CASE("minimize on the shot backend stays within statistical tolerance") {
  const TBParameters p;
  const auto d = decompose(build_s_block(p, KPoint{0.125, 0.125, 0.125, "q"}));
  const double lowest = oracle::jacobi_eigenvalues(reconstruct_matrix(d)).front();
  ShotBackend sb;
  OptimizerConfig cfg;
  cfg.fd_step = kPi / 32;
  cfg.tol_ev = 1e-3;
  cfg.max_iter = 60;
  cfg.restarts = 3;
  const auto r = minimize(d, Ansatz::mean_field(), sb, cfg);
  const double sigma = energy_standard_error_bound(d, sb);
  CHECK(sigma > 0.0);
  CHECK(r.energy >= lowest - 3 * sigma);
  // the optimum should still be close to the ground state of the exact surface
  CHECK(exact_expectation(prepare_meanfield(r.theta[0], r.theta[1]), d) <= lowest + 0.05);
}

TEST_CASE("same seed, same result") {
  const auto d = decompose(build_s_block(TBParameters{}, kpoints::L()));
  ShotBackend sb;
  sb.shots = 1024;
  OptimizerConfig cfg;
  cfg.fd_step = kPi / 32;
  cfg.tol_ev = 1e-3;
  cfg.max_iter = 20;
  const auto a = minimize(d, Ansatz::mean_field(), sb, cfg);
  const auto b = minimize(d, Ansatz::mean_field(), sb, cfg);
  CHECK(a.energy == b.energy);
  CHECK(a.theta == b.theta);
}

TEST_CASE("grid scan") {
  SECTION("Z: minimum on the theta = pi row") {
    const auto s = grid_scan(single("Z", 1.0), 9, 9, ExactBackend{});
    CHECK(s.minimum() == Approx(-1.0));
    CHECK(s.argmin_theta == 8);
    CHECK(s.theta.back() == Approx(kPi));
    CHECK(s.phi.front() == Approx(-kPi));
    CHECK(s.phi.back() == Approx(kPi));
  }
  SECTION("X: surface is sin(theta) cos(phi)") {
    const auto s = grid_scan(single("X", 1.0), 32, 64, ExactBackend{});
    for (std::size_t i = 0; i < s.theta.size(); ++i) {
      for (std::size_t j = 0; j < s.phi.size(); ++j) {
        CHECK(std::abs(s.at(i, j) - std::sin(s.theta[i]) * std::cos(s.phi[j])) < 1e-12);
      }
    }
  }
  SECTION("errors") {
    CHECK_THROWS_AS(grid_scan(single("ZZ", 1.0), 9, 9, ExactBackend{}), std::invalid_argument);
    CHECK_THROWS_AS(grid_scan(single("Z", 1.0), 1, 9, ExactBackend{}), std::invalid_argument);
  }
  SECTION("argmin agrees with minimize to one grid step") {
    std::mt19937_64 g(8);
    for (int trial = 0; trial < 10; ++trial) {
      const auto d = decompose(oracle::random_hermitian(2, g, 2.0));
      const auto s = grid_scan(d, 32, 64, ExactBackend{});
      const auto r = minimize(d, Ansatz::mean_field(), ExactBackend{}, exact_config(3));
      const auto a = bloch(s.theta[s.argmin_theta], s.phi[s.argmin_phi]);
      const auto b = bloch(r.theta[0], r.theta[1]);
      const double cosang = std::clamp(a[0] * b[0] + a[1] * b[1] + a[2] * b[2], -1.0, 1.0);
      const double step = std::hypot(s.theta[1] - s.theta[0], s.phi[1] - s.phi[0]);
      CHECK(std::acos(cosang) <= step);
      CHECK(s.minimum() >= r.energy - 1e-9);
    }
  }
  SECTION("shot-sampled minimum within 3 sigma of the oracle") {
    const auto d = decompose(build_s_block(TBParameters{}, KPoint{0.125, 0.125, 0.125, "q"}));
    const double lowest = oracle::jacobi_eigenvalues(reconstruct_matrix(d)).front();
    ShotBackend sb;
    const auto s = grid_scan(d, 32, 64, sb, 42);
    const auto exact = grid_scan(d, 32, 64, ExactBackend{});
    const double sigma = energy_standard_error_bound(d, sb);
    CHECK(std::abs(s.minimum() - lowest) <= 3 * sigma);
    std::size_t outside = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i) outside += std::abs(s.values[i] - exact.values[i]) > 3 * sigma;
    // 3 sigma is a per-node bound: allow the binomial expectation of 0.27% outliers
    CHECK(outside <= s.values.size() / 100);
  }
}

TEST_CASE("full spectrum") {
  SECTION("diagonal two-level") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = -3;
    m(1, 1) = -1;
    const auto r = full_spectrum(decompose(m), 2, Ansatz::mean_field(), ExactBackend{}, exact_config(3));
    REQUIRE(r.energies.size() == 2);
    CHECK(r.energies[0] == Approx(-3.0).margin(1e-9));
    CHECK(r.energies[1] == Approx(-1.0).margin(1e-9));
    CHECK(r.ok());
  }
  SECTION("too many levels") {
    CHECK_THROWS_AS(full_spectrum(single("Z", 1.0), 3, Ansatz::mean_field(), ExactBackend{}, exact_config(1)),
                    std::invalid_argument);
  }
  SECTION("random 8x8 matrices") {
    std::mt19937_64 g(77);
    for (int trial = 0; trial < 3; ++trial) {
      const auto h = oracle::random_hermitian(8, g, 2.0);
      const auto ev = oracle::jacobi_eigenvalues(h);
      auto cfg = exact_config(20);
      cfg.seed = static_cast<std::uint64_t>(trial);
      const auto r = full_spectrum(decompose(h), 8, Ansatz::three_qubit(), ExactBackend{}, cfg);
      CHECK(r.ok());
      for (std::size_t i = 0; i < 8; ++i) CHECK(r.energies[i] == Approx(ev[i]).margin(1e-2));
      for (const auto& l : r.levels) CHECK(l.residual < 1e-3);
    }
  }
  SECTION("two bands of the s-block along a path") {
    const TBParameters p;
    const auto path = make_kpath({kpoints::X(), kpoints::gamma(), kpoints::L()}, 5);
    for (const auto& k : path.points) {
      const auto b = build_s_block(p, k);
      const auto ev = oracle::jacobi_eigenvalues(b.matrix());
      const auto r = full_spectrum(decompose(b), 2, Ansatz::mean_field(), ExactBackend{}, exact_config(3));
      CHECK(r.energies[0] == Approx(ev[0]).margin(1e-6));
      CHECK(r.energies[1] == Approx(ev[1]).margin(1e-6));
    }
  }
  SECTION("premature zero is flagged") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = -1;
    m(1, 1) = 2;
    SpectrumOptions opt;
    opt.shift = 0.0;
    const auto r = full_spectrum(decompose(m), 2, Ansatz::mean_field(), ExactBackend{}, exact_config(3), opt);
    CHECK_FALSE(r.ok());
    CHECK_FALSE(r.levels[0].zero_captured);
    CHECK(r.levels[1].zero_captured);
    const auto fixed = full_spectrum(decompose(m), 2, Ansatz::mean_field(), ExactBackend{}, exact_config(3));
    CHECK(fixed.ok());
    CHECK(fixed.energies[1] == Approx(2.0).margin(1e-9));
  }
  SECTION("an extra identity shift changes nothing") {
    std::mt19937_64 g(5);
    const auto h = oracle::random_hermitian(2, g, 2.0);
    const auto base = full_spectrum(decompose(h), 2, Ansatz::mean_field(), ExactBackend{}, exact_config(3));
    for (double extra : {-4.0, 0.5, 7.0}) {
      const auto moved = full_spectrum(shift_identity(decompose(h), extra), 2, Ansatz::mean_field(), ExactBackend{},
                                       exact_config(3));
      for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(moved.energies[i] + extra - base.energies[i]) < 1e-9);
    }
  }
  SECTION("degenerate levels") {
    std::mt19937_64 g(11);
    const std::vector<double> ev{-2, -2, -2, 0, 1, 1, 3, 4};
    const auto h = with_spectrum(ev, g);
    const auto r = full_spectrum(decompose(h), 8, Ansatz::three_qubit(), ExactBackend{}, exact_config(20));
    for (std::size_t i = 0; i < 8; ++i) CHECK(r.energies[i] == Approx(ev[i]).margin(1e-2));
  }
}

TEST_CASE("energy estimator") {
  std::mt19937_64 g(19);
  const auto h = oracle::random_hermitian(8, g, 1.0);
  const auto d = decompose(h);
  const Vector v = oracle::random_state(8, g);
  const StateVector psi(3, std::vector<complex_t>(v.data(), v.data() + 8));
  EnergyEstimator exact(d, ExactBackend{}, 0);
  CHECK(std::abs(exact.energy(psi) - exact_expectation(psi, d)) < 1e-12);

  SECTION("shot estimates scatter like the error bound") {
    ShotBackend sb;
    sb.shots = 4096;
    EnergyEstimator est(d, sb, 3);
    const double sigma = energy_standard_error_bound(d, sb);
    const double truth = exact_expectation(psi, d);
    double s1 = 0, s2 = 0;
    const int reps = 200;
    for (int i = 0; i < reps; ++i) {
      const double e = est.energy(psi);
      s1 += e;
      s2 += e * e;
    }
    const double mean = s1 / reps, sd = std::sqrt((s2 - s1 * s1 / reps) / (reps - 1));
    CHECK(sd <= sigma * 1.2);
    CHECK(std::abs(mean - truth) <= 3 * sigma / std::sqrt(double(reps)));
  }
  SECTION("mitigated estimates are unbiased under readout noise") {
    ShotBackend sb;
    sb.shots = 4096;
    sb.noise = ReadoutNoiseModel::uniform(0.05, 0.05);
    sb.mitigate = true;
    sb.mitigation_rates = sb.noise;
    EnergyEstimator est(d, sb, 4);
    const double truth = exact_expectation(psi, d);
    double s1 = 0;
    const int reps = 100;
    for (int i = 0; i < reps; ++i) s1 += est.energy(psi);
    const double sigma = energy_standard_error_bound(d, sb);
    CHECK(std::abs(s1 / reps - truth) <= 3 * sigma / std::sqrt(double(reps)));
  }
}
