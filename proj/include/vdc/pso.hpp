// Copyright 2026 the vdc authors
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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace vdc {

/// Swarm optimizer configuration. The inertia/acceleration constants default
/// to the tuned set the controller gains were produced with.
struct PsoConfig {
  int n_particles = 30;
  int max_generations = 25;  // G
  double omega_max = 1.0;
  double omega_min = 0.1;
  double lambda1 = 3.0;   // inertia decay rate
  double lambda2 = 30.0;  // inertia scale divisor
  double c1_init = 2.2;
  double c2_init = 2.2;
  double accel_lo = 0.5;  // acceleration coefficient clamp
  double accel_hi = 4.0;
  double velocity_frac = 0.5;  // per-dimension speed limit as range fraction
  std::vector<std::array<double, 2>> bounds;  // per-dimension [lo, hi]
  std::uint64_t seed = 0;

  void validate() const {
    if (!(n_particles >= 1)) throw std::invalid_argument("PsoConfig: need particles");
    if (!(max_generations >= 1)) throw std::invalid_argument("PsoConfig: need generations");
    if (!(omega_max > omega_min && omega_min > 0.0))
      throw std::invalid_argument("PsoConfig: need omega_max > omega_min > 0");
    if (!(lambda2 > 0.0)) throw std::invalid_argument("PsoConfig: lambda2 must be > 0");
    if (bounds.empty()) throw std::invalid_argument("PsoConfig: bounds required");
    for (const auto& b : bounds)
      if (!(b[0] < b[1])) throw std::invalid_argument("PsoConfig: bound lo must be < hi");
  }
};

/// Exponentially decaying inertia weight,
///   omega(g) = omega_min + exp(omega_max - lambda1*(omega_max+omega_min)*g/G) / lambda2.
inline double inertia_weight(int g, const PsoConfig& cfg) {
  const double frac = static_cast<double>(g) / cfg.max_generations;
  const double arg = cfg.omega_max - cfg.lambda1 * (cfg.omega_max + cfg.omega_min) * frac;
  return cfg.omega_min + std::exp(arg) / cfg.lambda2;
}

/// Four-phase acceleration-coefficient schedule. Early generations grow the
/// cognitive term and shrink the social term (exploration); late generations
/// reverse gently (exploitation). Returns the updated (c1, c2), clamped.
inline std::pair<double, double> acceleration_schedule(int g, int G, double c1,
                                                       double c2,
                                                       double lo = 0.5,
                                                       double hi = 4.0) {
  const double frac = static_cast<double>(g) / G;
  double alpha, beta;
  if (frac <= 0.30) {
    alpha = 0.085;
    beta = -0.0425;
  } else if (frac <= 0.60) {
    alpha = 0.045;
    beta = -0.09;
  } else if (frac <= 0.85) {
    alpha = -0.025;
    beta = 0.05;
  } else {
    alpha = -0.0025;
    beta = 0.0025;
  }
  return {std::clamp(c1 + alpha, lo, hi), std::clamp(c2 + beta, lo, hi)};
}

struct PsoGenerationStat {
  int generation = 0;
  double best_fitness = 0.0;
  double omega = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

struct PsoResult {
  std::vector<double> best_position;
  double best_fitness = std::numeric_limits<double>::infinity();
  std::vector<PsoGenerationStat> history;
};

/// Minimizes `fitness` over the configured box. Fitness values that are not
/// finite are treated as +infinity and the run continues. The update is
/// synchronous: every velocity in a generation sees the previous
/// generation's bests, and all random draws are made in particle order
/// before any evaluation, so evaluating particles in parallel could not
/// change the result.
template <typename F>
PsoResult optimize(F&& fitness, const PsoConfig& cfg) {
  cfg.validate();
  const std::size_t dim = cfg.bounds.size();
  const int n = cfg.n_particles;
  const int G = cfg.max_generations;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto sanitize = [](double f) {
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> x(n, std::vector<double>(dim));
  std::vector<std::vector<double>> v(n, std::vector<double>(dim, 0.0));
  for (auto& xi : x)
    for (std::size_t d = 0; d < dim; ++d)
      xi[d] = cfg.bounds[d][0] + unit(rng) * (cfg.bounds[d][1] - cfg.bounds[d][0]);

  std::vector<std::vector<double>> pb = x;
  std::vector<double> pb_fit(n);
  PsoResult out;
  for (int i = 0; i < n; ++i) {
    pb_fit[i] = sanitize(fitness(x[i]));
    if (pb_fit[i] < out.best_fitness) {
      out.best_fitness = pb_fit[i];
      out.best_position = x[i];
    }
  }
  if (out.best_position.empty()) out.best_position = x[0];  // all-infinite start

  double c1 = cfg.c1_init;
  double c2 = cfg.c2_init;
  out.history.reserve(G);

  for (int g = 1; g <= G; ++g) {
    const double omega = inertia_weight(g, cfg);

    for (int i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < dim; ++d) {
        const double r1 = unit(rng);
        const double r2 = unit(rng);
        const double range = cfg.bounds[d][1] - cfg.bounds[d][0];
        const double v_lim = cfg.velocity_frac * range;
        double vel = omega * v[i][d] + c1 * r1 * (pb[i][d] - x[i][d]) +
                     c2 * r2 * (out.best_position[d] - x[i][d]);
        vel = std::clamp(vel, -v_lim, v_lim);
        double pos = x[i][d] + vel;
        if (pos < cfg.bounds[d][0]) {
          pos = cfg.bounds[d][0];
          vel = 0.0;
        } else if (pos > cfg.bounds[d][1]) {
          pos = cfg.bounds[d][1];
          vel = 0.0;
        }
        v[i][d] = vel;
        x[i][d] = pos;
      }
    }

    for (int i = 0; i < n; ++i) {
      const double f = sanitize(fitness(x[i]));
      if (f < pb_fit[i]) {
        pb_fit[i] = f;
        pb[i] = x[i];
      }
    }
    for (int i = 0; i < n; ++i) {
      if (pb_fit[i] < out.best_fitness) {
        out.best_fitness = pb_fit[i];
        out.best_position = pb[i];
      }
    }

    out.history.push_back({g, out.best_fitness, omega, c1, c2});
    std::tie(c1, c2) = acceleration_schedule(g, G, c1, c2, cfg.accel_lo, cfg.accel_hi);
  }
  return out;
}

/// Writes the per-generation log as CSV: generation, best fitness, omega,
/// c1, c2.
inline void write_history_csv(std::ostream& os,
                              const std::vector<PsoGenerationStat>& history) {
  os << "generation,best_fitness,omega,c1,c2\n";
  for (const auto& h : history)
    os << h.generation << ',' << h.best_fitness << ',' << h.omega << ',' << h.c1
       << ',' << h.c2 << '\n';
}

}  // namespace vdc
