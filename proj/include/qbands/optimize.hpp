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

// Local minimisers used by the variational driver: a quasi-Newton (BFGS)
// method on central finite-difference gradients and a gradient-free
// Nelder-Mead simplex search.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbands {

enum class OptimizerMethod { QuasiNewton, DirectSearch };

inline std::string to_string(OptimizerMethod m) {
  return m == OptimizerMethod::QuasiNewton ? "bfgs" : "nelder-mead";
}

inline OptimizerMethod parse_optimizer_method(const std::string& s) {
  if (s == "bfgs" || s == "quasi-newton" || s == "BFGS") return OptimizerMethod::QuasiNewton;
  if (s == "nelder-mead" || s == "direct" || s == "direct-search" || s == "cobyla" || s == "COBYLA") {
    return OptimizerMethod::DirectSearch;
  }
  throw std::invalid_argument("unknown optimizer method '" + s + "'");
}

struct OptimizerConfig {
  OptimizerMethod method = OptimizerMethod::QuasiNewton;
  std::size_t max_iter = 2000;
  double tol_ev = 1e-10;   // energy change that counts as converged
  double fd_step = 1e-4;   // central-difference step, radians
  std::size_t restarts = 3;
  std::uint64_t seed = 1;
  double simplex_step = 0.5;  // initial simplex edge, radians
  double max_step = 2.0;      // cap on a single quasi-Newton step length

  void validate() const {
    if (!(tol_ev > 0.0)) throw std::invalid_argument("optimizer tolerance must be positive");
    if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    if (!(fd_step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  }
};

using Objective = std::function<double(std::span<const double>)>;
using IterationHook = std::function<void(std::size_t)>;

struct OptimizeResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

class CountingObjective {
 public:
  explicit CountingObjective(const Objective& f) : f_(f) {}
  double operator()(std::span<const double> x) {
    ++count_;
    const double v = f_(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  }
  std::size_t count() const { return count_; }

 private:
  const Objective& f_;
  std::size_t count_ = 0;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

inline OptimizeResult optimize_quasinewton(const Objective& objective, std::vector<double> x0,
                                           const OptimizerConfig& cfg, const IterationHook& hook = {}) {
  cfg.validate();
  detail::CountingObjective f(objective);
  const std::size_t n = x0.size();
  std::vector<double> x = std::move(x0);

  auto gradient = [&](const std::vector<double>& at) {
    std::vector<double> g(n);
    std::vector<double> probe = at;
    for (std::size_t i = 0; i < n; ++i) {
      probe[i] = at[i] + cfg.fd_step;
      const double fp = f(probe);
      probe[i] = at[i] - cfg.fd_step;
      const double fm = f(probe);
      probe[i] = at[i];
      g[i] = (fp - fm) / (2.0 * cfg.fd_step);
    }
    return g;
  };

  // Inverse Hessian estimate, row-major.
  std::vector<double> hinv(n * n, 0.0);
  auto reset_hessian = [&] {
    std::fill(hinv.begin(), hinv.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) hinv[i * n + i] = 1.0;
  };
  reset_hessian();

  double fx = f(x);
  std::vector<double> g = gradient(x);
  OptimizeResult out;
  std::size_t small_steps = 0;
  bool fresh_hessian = true;

  std::size_t iter = 0;
  for (; iter < cfg.max_iter; ++iter) {
    out.iterations = iter + 1;
    if (hook) hook(iter);
    if (detail::inf_norm(g) <= 1e-12) {
      out.converged = true;
      break;
    }
    std::vector<double> p(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) p[i] -= hinv[i * n + j] * g[j];
    }
    double slope = detail::dot(g, p);
    if (!(slope < 0.0)) {
      reset_hessian();
      fresh_hessian = true;
      for (std::size_t i = 0; i < n; ++i) p[i] = -g[i];
      slope = detail::dot(g, p);
    }
    const double plen = std::sqrt(detail::dot(p, p));
    double alpha = plen > cfg.max_step ? cfg.max_step / plen : 1.0;

    // Backtracking Armijo search.
    std::vector<double> xn(n);
    double fn = fx;
    bool accepted = false;
    for (int k = 0; k < 50; ++k) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + alpha * p[i];
      fn = f(xn);
      if (fn <= fx + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (!fresh_hessian) {
        reset_hessian();
        fresh_hessian = true;
        continue;
      }
      // No descent along the steepest direction: stationary to working precision.
      out.converged = detail::inf_norm(g) < 1e-4;
      break;
    }

    std::vector<double> gn = gradient(xn);
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
    }
    const double sy = detail::dot(s, y);
    if (sy > 1e-14 * std::sqrt(detail::dot(s, s) * detail::dot(y, y))) {
      if (fresh_hessian) {
        // Scale the initial inverse Hessian before the first update.
        const double scale = sy / detail::dot(y, y);
        for (std::size_t i = 0; i < n; ++i) hinv[i * n + i] = scale;
      }
      std::vector<double> hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) hy[i] += hinv[i * n + j] * y[j];
      }
      const double yhy = detail::dot(y, hy);
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          hinv[i * n + j] += (1.0 + rho * yhy) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
      }
      fresh_hessian = false;
    }

    const double df = fx - fn;
    x = std::move(xn);
    fx = fn;
    g = std::move(gn);
    small_steps = df <= cfg.tol_ev ? small_steps + 1 : 0;
    if (small_steps >= 2) {
      out.converged = true;
      break;
    }
  }

  out.x = std::move(x);
  out.f = fx;
  out.evaluations = f.count();
  return out;
}

inline OptimizeResult optimize_direct(const Objective& objective, std::vector<double> x0,
                                      const OptimizerConfig& cfg, const IterationHook& hook = {}) {
  cfg.validate();
  detail::CountingObjective f(objective);
  const std::size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("empty parameter vector");

  // Adaptive coefficients for higher-dimensional problems.
  const double dim = static_cast<double>(n);
  const double reflect = 1.0;
  const double expand = 1.0 + 2.0 / dim;
  const double contract = 0.75 - 1.0 / (2.0 * dim);
  const double shrink = 1.0 - 1.0 / dim;

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += cfg.simplex_step;
  std::vector<double> fs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fs[i] = f(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  OptimizeResult out;
  std::size_t iter = 0;
  for (; iter < cfg.max_iter; ++iter) {
    out.iterations = iter + 1;
    if (hook) hook(iter);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]));
    }
    if (fs[worst] - fs[best] <= cfg.tol_ev && diameter <= 1e-8 + std::sqrt(cfg.tol_ev)) {
      out.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / dim;
    }
    auto along = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
      return p;
    };

    auto xr = along(-reflect);
    const double fr = f(xr);
    if (fr < fs[best]) {
      auto xe = along(-reflect * expand);
      const double fe = f(xe);
      if (fe < fr) {
        simplex[worst] = std::move(xe);
        fs[worst] = fe;
      } else {
        simplex[worst] = std::move(xr);
        fs[worst] = fr;
      }
      continue;
    }
    if (fr < fs[second]) {
      simplex[worst] = std::move(xr);
      fs[worst] = fr;
      continue;
    }
    const bool outside = fr < fs[worst];
    auto xc = along(outside ? -reflect * contract : contract);
    const double fc = f(xc);
    if (fc < (outside ? fr : fs[worst])) {
      simplex[worst] = std::move(xc);
      fs[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[best][j] + shrink * (simplex[i][j] - simplex[best][j]);
      fs[i] = f(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin());
  out.x = simplex[best];
  out.f = fs[best];
  out.evaluations = f.count();
  return out;
}

inline OptimizeResult optimize(const Objective& objective, std::vector<double> x0, const OptimizerConfig& cfg,
                               const IterationHook& hook = {}) {
  return cfg.method == OptimizerMethod::QuasiNewton ? optimize_quasinewton(objective, std::move(x0), cfg, hook)
                                                    : optimize_direct(objective, std::move(x0), cfg, hook);
}

}  // namespace qbands
