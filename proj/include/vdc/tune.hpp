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

#include <optional>

#include "vdc/pso.hpp"
#include "vdc/simulation.hpp"

namespace vdc {

struct TuneResult {
  PidGains gains{};
  double mse = 0.0;  // speed-tracking MSE achieved by the returned gains
  PsoResult search;  // full optimizer output, including per-generation stats
};

/// Swarm-searches the PID gain box of the scenario against the longitudinal
/// closed loop and returns the best triplet found.
inline TuneResult tune_pid(const Scenario& sc,
                           std::optional<std::uint64_t> seed_override = {}) {
  PsoConfig cfg = sc.pso;
  if (cfg.bounds.size() != 3)
    throw std::invalid_argument("tune_pid: gain search needs 3-dim bounds");
  if (seed_override) cfg.seed = *seed_override;

  const auto fitness = [&sc](const std::vector<double>& g) {
    return run_longitudinal_mse(sc, {g[0], g[1], g[2]});
  };
  TuneResult out;
  out.search = optimize(fitness, cfg);
  out.gains = {out.search.best_position[0], out.search.best_position[1],
               out.search.best_position[2]};
  out.mse = out.search.best_fitness;
  return out;
}

}  // namespace vdc
