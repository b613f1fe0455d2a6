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
#include "qbands/sampler.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <random>
#include <sstream>

using namespace qbands;
using Catch::Approx;

namespace {

StateVector from_eigen(const Vector& v, int n) {
  return StateVector(n, std::vector<complex_t>(v.data(), v.data() + v.size()));
}

// Dense basis-change unitary built from the gate list.
Matrix dense_unitary(const std::vector<Gate>& gates, int n) {
  Matrix u = Matrix::Identity(1 << n, 1 << n);
  for (const auto& g : gates) {
    Matrix m;
    switch (g.kind) {
      case GateKind::H: m = oracle::hadamard(); break;
      case GateKind::S: m = oracle::s_gate(); break;
      case GateKind::Z: m = oracle::pauli_matrix('Z'); break;
      default: FAIL("unexpected gate in basis change");
    }
    u = oracle::embed(m, g.target, n) * u;
  }
  return u;
}

// Variance of a +-1 readout of a state with true mean `m`.
double pm_sigma(double m, double shots) { return std::sqrt(std::max(1.0 - m * m, 1e-12) / shots); }

}  // namespace

TEST_CASE("counts bookkeeping and labels") {
  BitstringCounts c(5, 11);
  c.add(0b00101, 3);
  c.add(0b10000);
  CHECK(c.shots() == 4);
  CHECK(c.seed() == 11);
  CHECK(c.label(0b00101) == "00101");
  CHECK(BitstringCounts::parse_label("10000") == 0b10000u);
  CHECK(c.probability(0b00101) == Approx(0.75));
  std::ostringstream os;
  c.write_csv(os);
  CHECK(os.str().find("00101,3") != std::string::npos);
}

TEST_CASE("basis change reproduces every 1- and 2-qubit word") {
  for (int n = 1; n <= 2; ++n) {
    for (std::size_t i = 0; i < pauli_basis_size(n); ++i) {
      const auto w = PauliWord::from_index(n, i);
      const auto bc = basis_change(w);
      CHECK(bc.diagonal.is_diagonal());
      const Matrix u = dense_unitary(bc.gates, n);
      const Matrix lhs = u.adjoint() * oracle::word_matrix(bc.diagonal.str()) * u;
      CHECK((lhs - oracle::word_matrix(w.str())).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  const auto z = basis_change(PauliWord::parse("Z"));
  CHECK(z.gates.empty());
  CHECK(z.diagonal.str() == "Z");
  const auto x = basis_change(PauliWord::parse("X"));
  REQUIRE(x.gates.size() == 1);
  CHECK(x.gates[0].kind == GateKind::H);

  // (H S Z)^dagger Z (H S Z) = Y
  const Matrix hsz = oracle::hadamard() * oracle::s_gate() * oracle::pauli_matrix('Z');
  CHECK((hsz.adjoint() * oracle::pauli_matrix('Z') * hsz - oracle::pauli_matrix('Y')).cwiseAbs().maxCoeff() < 1e-15);
  // the other ordering does not work
  const Matrix zsh = oracle::pauli_matrix('Z') * oracle::s_gate() * oracle::hadamard();
  CHECK((zsh.adjoint() * oracle::pauli_matrix('Z') * zsh - oracle::pauli_matrix('Y')).cwiseAbs().maxCoeff() > 0.5);

  auto plus = apply_gate(StateVector(1), Gate::h(1));
  plus.apply(x.gates);
  CHECK(std::abs(plus[0]) == Approx(1.0));

  auto iplus = prepare_meanfield(kPi / 2, kPi / 2);
  iplus.apply(basis_change(PauliWord::parse("Y")).gates);
  CHECK(pauli_expectation(iplus, PauliWord::parse("Z")) == Approx(1.0));
}

TEST_CASE("sampling statistics") {
  const auto c0 = sample(StateVector(1), 1000, std::nullopt, 1);
  CHECK(c0.count(0) == 1000);
  CHECK(c0.counts().size() == 1);
  CHECK_THROWS_AS(sample(StateVector(1), 0, std::nullopt, 1), std::invalid_argument);

  const auto plus = apply_gate(StateVector(1), Gate::h(1));
  const auto cp = sample(plus, 8192, std::nullopt, 2);
  CHECK(std::abs(cp.probability(0) - 0.5) <= 3 * oracle::binomial_sigma(0.5, 8192));

  const auto noisy = sample(StateVector(1), 100000, ReadoutNoiseModel::uniform(0.03, 0.0), 3);
  CHECK(std::abs(noisy.probability(1) - 0.03) <= 3 * oracle::binomial_sigma(0.03, 100000));

  // distribution of a random 3-qubit state, every outcome within 4 sigma
  std::mt19937_64 g(6);
  const auto psi = from_eigen(oracle::random_state(8, g), 3);
  const auto c = sample(psi, 200000, std::nullopt, 4);
  CHECK(c.shots() == 200000);
  for (std::uint32_t b = 0; b < 8; ++b) {
    const double p = psi.probability(b);
    CHECK(std::abs(c.probability(b) - p) <= 4 * oracle::binomial_sigma(p, 200000) + 1e-12);
  }

  // same seed, same counts
  CHECK(sample(psi, 5000, ReadoutNoiseModel::uniform(0.1, 0.2), 9).counts() ==
        sample(psi, 5000, ReadoutNoiseModel::uniform(0.1, 0.2), 9).counts());
  CHECK(sample(psi, 5000, std::nullopt, 9).counts() != sample(psi, 5000, std::nullopt, 10).counts());
}

TEST_CASE("parity estimator") {
  BitstringCounts c(5);
  c.add(BitstringCounts::parse_label("00101"), 1000);
  CHECK(expectation_from_counts(c, PauliWord::parse("IZZIZ")) == 1.0);
  CHECK(expectation_from_counts(c, PauliWord::parse("IIIIZ")) == -1.0);
  CHECK(expectation_from_counts(c, PauliWord::parse("IIIII")) == 1.0);

  BitstringCounts one(1);
  one.add(0, 75);
  one.add(1, 25);
  CHECK(expectation_from_counts(one, PauliWord::parse("Z")) == Approx(0.5));
  CHECK(expectation_from_counts(one, PauliWord::parse("I")) == 1.0);
  CHECK_THROWS_AS(expectation_from_counts(one, PauliWord::parse("X")), std::invalid_argument);
  CHECK_THROWS_AS(expectation_from_counts(one, PauliWord::parse("ZZ")), std::invalid_argument);
}

TEST_CASE("basis change plus parity agrees with exact expectations") {
  std::mt19937_64 g(12);
  const std::uint64_t shots = 100000;
  for (int n = 1; n <= 2; ++n) {
    const auto psi = from_eigen(oracle::random_state(1 << n, g), n);
    for (std::size_t i = 0; i < pauli_basis_size(n); ++i) {
      const auto w = PauliWord::from_index(n, i);
      const double exact = pauli_expectation(psi, w);
      const double est = estimate_pauli(psi, w, shots, std::nullopt, std::nullopt, 100 + i);
      CHECK(std::abs(est - exact) <= 4 * pm_sigma(exact, shots) + 1e-12);
    }
  }
}

TEST_CASE("parity estimator converges at a million shots") {
  std::mt19937_64 g(13);
  const std::uint64_t shots = 1000000;
  for (int n : {2, 3}) {
    const auto psi = from_eigen(oracle::random_state(1 << n, g), n);
    for (std::size_t i = 1; i < pauli_basis_size(n); i += 5) {
      const auto w = PauliWord::from_index(n, i);
      const double exact = pauli_expectation(psi, w);
      const double est = estimate_pauli(psi, w, shots, std::nullopt, std::nullopt, 500 + i);
      CHECK(std::abs(est - exact) <= 4 * pm_sigma(exact, shots) + 1e-12);
    }
  }
}

TEST_CASE("noise model validation") {
  CHECK_THROWS_AS(ReadoutNoiseModel::uniform(-0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ReadoutNoiseModel::uniform(0.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(ReadoutNoiseModel({{0.0, 0.1}}, RateDrift{0.01, 0.0}), std::invalid_argument);
  CHECK(ReadoutNoiseModel::uniform(0.4, 0.5).mitigable());
  CHECK_FALSE(ReadoutNoiseModel::uniform(0.5, 0.5).mitigable());
  const ReadoutNoiseModel per_qubit({{0.01, 0.02}, {0.03, 0.04}});
  CHECK(per_qubit.at(2).w10 == 0.04);
  CHECK_THROWS_AS(per_qubit.at(3), std::out_of_range);
  const ReadoutNoiseModel drifting({{0.0, 0.05}}, RateDrift{0.01, 18.0});
  CHECK(drifting.at(1, 4.5).w10 == Approx(0.06));
  CHECK(drifting.at(1, 13.5).w10 == Approx(0.04));
  CHECK(drifting.at(1, 9.0).w01 == 0.0);
}

TEST_CASE("transition-rate estimation") {
  const auto zero = estimate_transition_rates(2, std::nullopt, 1000, 1);
  for (int q = 1; q <= 2; ++q) {
    CHECK(zero.at(q).w01 == 0.0);
    CHECK(zero.at(q).w10 == 0.0);
  }
  const std::uint64_t trials = 100000;
  const auto est = estimate_transition_rates(3, ReadoutNoiseModel({{0.03, 0.07}}), trials, 2);
  for (int q = 1; q <= 3; ++q) {
    CHECK(std::abs(est.at(q).w01 - 0.03) <= 3 * oracle::binomial_sigma(0.03, trials));
    CHECK(std::abs(est.at(q).w10 - 0.07) <= 3 * oracle::binomial_sigma(0.07, trials));
  }
  CHECK_THROWS_AS(estimate_transition_rates(1, std::nullopt, 0, 1), std::invalid_argument);

  const ReadoutNoiseModel drifting({{0.02, 0.05}}, RateDrift{0.01, 18.0});
  for (int t = 0; t < 36; ++t) {
    const double truth = 0.05 + 0.01 * std::sin(2 * kPi * t / 18.0);
    const auto r = estimate_transition_rates(1, drifting, trials, derive_seed(7, {static_cast<std::uint64_t>(t)}), t);
    CHECK(std::abs(r.at(1).w10 - truth) <= 4 * oracle::binomial_sigma(truth, trials));
    CHECK(std::abs(r.at(1).w01 - 0.02) <= 4 * oracle::binomial_sigma(0.02, trials));
  }
}

TEST_CASE("single-qubit mitigation") {
  CHECK(mitigate_single(0.5, {0.0, 0.0}) == 0.5);
  CHECK(mitigate_single(0.5, {0.1, 0.1}) == Approx(0.625));
  CHECK(mitigate_single(-0.999, {0.0, 0.3}) >= -1.0);
  CHECK(mitigate_single(-0.999, {0.0, 0.3}) == -1.0);
  CHECK(mitigate_single(0.999, {0.3, 0.0}) == 1.0);
  CHECK_THROWS_AS(mitigate_single(0.1, {0.5, 0.5}), std::domain_error);
}

TEST_CASE("multi-qubit mitigation") {
  std::mt19937_64 g(44);
  SECTION("zero model is the plain parity estimator") {
    const auto psi = from_eigen(oracle::random_state(8, g), 3);
    const auto c = sample(psi, 4096, std::nullopt, 1);
    for (const char* w : {"ZZZ", "IZI", "ZIZ", "III"}) {
      const auto word = PauliWord::parse(w);
      CHECK(mitigate_counts(c, ReadoutNoiseModel::uniform(0.0, 0.0), word) == expectation_from_counts(c, word));
    }
  }
  SECTION("one qubit reduces to mitigate_single") {
    std::uniform_real_distribution<double> u(0.0, 0.2);
    for (int i = 0; i < 50; ++i) {
      const QubitRates r{u(g), u(g)};
      const auto psi = from_eigen(oracle::random_state(2, g), 1);
      const auto c = sample(psi, 2000, ReadoutNoiseModel({r}), static_cast<std::uint64_t>(i));
      const auto z = PauliWord::parse("Z");
      CHECK(mitigate_counts(c, ReadoutNoiseModel({r}), z) ==
            Approx(mitigate_single(expectation_from_counts(c, z), r)).margin(1e-14));
    }
  }
  SECTION("ZZ on |00> with w01 = 0.05") {
    const std::uint64_t shots = 100000;
    const auto noise = ReadoutNoiseModel::uniform(0.05, 0.0);
    const auto c = sample(StateVector(2), shots, noise, 77);
    const auto zz = PauliWord::parse("ZZ");
    const double raw = expectation_from_counts(c, zz);
    const double fixed = mitigate_counts(c, noise, zz);
    // raw readout has variance 1 - 0.81^2, inflated by 1/(1-p+)^2 after correction
    const double sigma = std::sqrt((1 - 0.81 * 0.81) / shots) / (0.95 * 0.95);
    CHECK(std::abs(raw - 0.81) <= 3 * std::sqrt((1 - 0.81 * 0.81) / shots));
    CHECK(std::abs(fixed - 1.0) <= 3 * sigma);
  }
  SECTION("ill-posed rates") {
    BitstringCounts c(1);
    c.add(0, 10);
    CHECK_THROWS_AS(mitigate_counts(c, ReadoutNoiseModel::uniform(0.6, 0.5), PauliWord::parse("Z")), std::domain_error);
  }
}

TEST_CASE("mitigation removes readout bias on random states") {
  std::mt19937_64 g(2718);
  std::uniform_real_distribution<double> u(0.0, 0.2);
  const std::uint64_t shots = 100000;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 2;
    std::vector<QubitRates> rates;
    for (int q = 0; q < n; ++q) rates.push_back({u(g), u(g)});
    const ReadoutNoiseModel noise(rates);
    const auto psi = from_eigen(oracle::random_state(1 << n, g), n);
    const auto word = PauliWord(n, 0, (1u << n) - 1);
    const double exact = pauli_expectation(psi, word);
    const auto c = sample(psi, shots, noise, derive_seed(5, {static_cast<std::uint64_t>(trial)}));
    double gain = 1.0;
    for (const auto& r : rates) gain *= 1.0 - r.p_plus();
    const double sigma = 1.0 / (gain * std::sqrt(static_cast<double>(shots)));
    CHECK(std::abs(mitigate_counts(c, noise, word) - exact) <= 3 * sigma);
  }
}

TEST_CASE("standard error of a Pauli estimate shrinks as one over root M") {
  std::mt19937_64 g(1);
  const auto psi = from_eigen(oracle::random_state(2, g), 1);
  const auto w = PauliWord::parse("X");
  std::vector<double> lx, ly;
  for (int e = 7; e <= 13; ++e) {
    const std::uint64_t m = 1ull << e;
    double s1 = 0, s2 = 0;
    const int reps = 100;
    for (int r = 0; r < reps; ++r) {
      const double v = estimate_pauli(psi, w, m, std::nullopt, std::nullopt, derive_seed(e, {static_cast<std::uint64_t>(r)}));
      s1 += v;
      s2 += v * v;
    }
    const double var = (s2 - s1 * s1 / reps) / (reps - 1);
    CHECK(var <= 1.0 / static_cast<double>(m) * 1.5);
    lx.push_back(std::log(static_cast<double>(m)));
    ly.push_back(0.5 * std::log(var));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  CHECK(std::abs(sxy / sxx + 0.5) <= 0.1);
}
