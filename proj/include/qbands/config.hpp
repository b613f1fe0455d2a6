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

// File formats: tight-binding parameters, readout-noise and optimizer
// configs (JSON), Hermitian matrices (JSON or CSV) and k-path specs.

#pragma once

#include "qbands/optimize.hpp"
#include "qbands/sampler.hpp"
#include "qbands/tightbinding.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbands {

using json = nlohmann::json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
  }
}

inline TBParameters tb_parameters_from_json(const json& j) {
  TBParameters p;
  for (const char* key : {"lattice_constant", "E_s", "E_p", "V_ss", "V_sp", "V_xx", "V_xy"}) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw std::invalid_argument(std::string("tight-binding parameter '") + key + "' missing or not a number");
    }
  }
  p.lattice_constant = j["lattice_constant"];
  p.E_s = j["E_s"];
  p.E_p = j["E_p"];
  p.V_ss = j["V_ss"];
  p.V_sp = j["V_sp"];
  p.V_xx = j["V_xx"];
  p.V_xy = j["V_xy"];
  p.validate();
  return p;
}

inline json to_json(const TBParameters& p) {
  return {{"lattice_constant", p.lattice_constant}, {"E_s", p.E_s}, {"E_p", p.E_p}, {"V_ss", p.V_ss},
          {"V_sp", p.V_sp}, {"V_xx", p.V_xx}, {"V_xy", p.V_xy}};
}

// {"qubits": [{"w01": .., "w10": ..}, ...], "drift_amplitude": .., "drift_period": ..}
// A top-level {"w01", "w10"} pair is accepted as a one-entry model.
inline ReadoutNoiseModel noise_model_from_json(const json& j) {
  std::vector<QubitRates> rates;
  auto read_rates = [](const json& e) {
    return QubitRates{e.value("w01", 0.0), e.value("w10", 0.0)};
  };
  if (j.contains("qubits")) {
    for (const auto& e : j.at("qubits")) rates.push_back(read_rates(e));
  } else {
    rates.push_back(read_rates(j));
  }
  std::optional<RateDrift> drift;
  if (j.contains("drift_amplitude") || j.contains("drift_period")) {
    drift = RateDrift{j.value("drift_amplitude", 0.0), j.value("drift_period", 1.0)};
  }
  return ReadoutNoiseModel(std::move(rates), drift);
}

inline json to_json(const ReadoutNoiseModel& m) {
  json q = json::array();
  for (const auto& r : m.rates()) q.push_back({{"w01", r.w01}, {"w10", r.w10}});
  json out = {{"qubits", q}};
  if (m.drift()) {
    out["drift_amplitude"] = m.drift()->amplitude;
    out["drift_period"] = m.drift()->period;
  }
  return out;
}

// Fields absent from `j` keep their values in `base`.
inline OptimizerConfig optimizer_config_from_json(const json& j, OptimizerConfig base = {}) {
  if (j.contains("method")) base.method = parse_optimizer_method(j["method"].get<std::string>());
  base.max_iter = j.value("max_iter", base.max_iter);
  base.tol_ev = j.value("tol_ev", base.tol_ev);
  base.fd_step = j.value("fd_step", base.fd_step);
  base.restarts = j.value("restarts", base.restarts);
  base.seed = j.value("seed", base.seed);
  base.simplex_step = j.value("simplex_step", base.simplex_step);
  base.validate();
  return base;
}

inline json to_json(const OptimizerConfig& c) {
  return {{"method", to_string(c.method)}, {"max_iter", c.max_iter}, {"tol_ev", c.tol_ev},
          {"fd_step", c.fd_step},          {"restarts", c.restarts}, {"seed", c.seed},
          {"simplex_step", c.simplex_step}};
}

// JSON: rows of [re, im] pairs, [[[re, im], ...], ...].
inline Matrix matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  Matrix m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != rows) throw std::invalid_argument("matrix is not square");
    for (Eigen::Index c = 0; c < rows; ++c) {
      const auto& e = row.at(static_cast<std::size_t>(c));
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else {
        m(r, c) = complex_t(e.at(0).get<double>(), e.at(1).get<double>());
      }
    }
  }
  return m;
}

// CSV: one matrix row per line as re,im,re,im,...; '#' lines are comments.
inline Matrix matrix_from_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    rows.push_back(std::move(vals));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& v = rows[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(v.size()) != 2 * n) {
      throw std::invalid_argument("CSV row " + std::to_string(r) + " needs " + std::to_string(2 * n) + " values");
    }
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = complex_t(v[2 * c], v[2 * c + 1]);
  }
  return m;
}

inline Matrix read_matrix_file(const std::string& path) {
  const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  if (is_json) return matrix_from_json(read_json_file(path));
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return matrix_from_csv(in);
}

inline KPoint named_kpoint(const std::string& name) {
  if (name == "G" || name == "Gamma" || name == "Γ") return kpoints::gamma();
  if (name == "X") return kpoints::X();
  if (name == "L") return kpoints::L();
  if (name == "W") return kpoints::W();
  if (name == "K") return kpoints::K();
  if (name == "U") return kpoints::U();
  throw std::invalid_argument("unknown high-symmetry point '" + name + "'");
}

// Either a label (G, X, L, W, K, U) or three fractional components in units
// of 2*pi/a separated by spaces.
inline KPoint parse_kpoint(const std::string& text) {
  std::stringstream ss(text);
  std::vector<std::string> tokens;
  for (std::string t; ss >> t;) tokens.push_back(t);
  if (tokens.size() == 1) return named_kpoint(tokens[0]);
  if (tokens.size() == 3) return KPoint(std::stod(tokens[0]), std::stod(tokens[1]), std::stod(tokens[2]));
  throw std::invalid_argument("cannot parse k-point '" + text + "'");
}

struct KPathSpec {
  std::vector<KPoint> anchors;
  std::size_t points_per_segment = 20;
};

// "X,G,L:20" or "1 0 0,0 0 0,0.5 0.5 0.5:20"; the ":N" suffix is optional.
inline KPathSpec parse_kpath_spec(const std::string& spec, std::size_t default_points = 20) {
  KPathSpec out;
  out.points_per_segment = default_points;
  std::string body = spec;
  if (auto colon = spec.rfind(':'); colon != std::string::npos) {
    body = spec.substr(0, colon);
    out.points_per_segment = std::stoul(spec.substr(colon + 1));
  }
  std::stringstream ss(body);
  for (std::string anchor; std::getline(ss, anchor, ',');) out.anchors.push_back(parse_kpoint(anchor));
  if (out.anchors.size() < 2) throw std::invalid_argument("k-path spec needs at least two anchors");
  return out;
}

}  // namespace qbands
