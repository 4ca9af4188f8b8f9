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
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "vdc/vehicle.hpp"

namespace vdc {

/// One station of the road description used by the speed planner.
struct RoadPoint {
  double s = 0.0;          // station along the path [m]
  double curvature = 0.0;  // path curvature [1/m]; <= 0 treated as straight
  double phi_r = 0.0;      // camber (bank) angle [rad]
  double mu = 0.95;        // adhesion [-]
};

/// Highest speed the curve at this station admits,
///   v_max = sqrt((g/rho_r) * (phi_r + mu) / (1 - phi_r*mu)).
/// Straight stations (curvature magnitude ~ 0) return +infinity. Throws a
/// domain error when 1 - phi_r*mu <= 0.
inline double max_curve_speed(const RoadPoint& pt) {
  if (!(pt.mu > 0.0)) throw std::invalid_argument("max_curve_speed: mu must be > 0");
  const double rho_r = std::abs(pt.curvature);
  if (rho_r < 1e-12) return std::numeric_limits<double>::infinity();
  const double denom = 1.0 - pt.phi_r * pt.mu;
  if (denom <= 0.0)
    throw std::domain_error("max_curve_speed: camber/adhesion out of domain");
  const double v2 = (kGravity / rho_r) * (pt.phi_r + pt.mu) / denom;
  if (v2 <= 0.0) return 0.0;
  return std::sqrt(v2);
}

/// Speed-dependent side-slip budget mapped to a front-steer bound:
///   |delta_f| <= atan((a+b) * tan(beta_max) / a),  beta_max = 10 - 7 v^2/40
/// with beta_max in degrees and v in m/s. This raw variant lets the inner
/// angle go to zero (no steering allowed) above ~7.56 m/s.
inline double steer_limit_raw(double v_x, const VehicleParams& p) {
  const double inner_deg = 10.0 - 7.0 * v_x * v_x / 40.0;
  if (inner_deg <= 0.0) return 0.0;
  const double inner = inner_deg * std::numbers::pi / 180.0;
  return std::atan((p.a + p.b) * std::tan(inner) / p.a);
}

/// Steering envelope used by the controller: same map as steer_limit_raw but
/// the inner angle is floored (default 1.5 deg) so the envelope shrinks with
/// speed without closing entirely, then clamped into [0, u_max].
inline double steer_limit(double v_x, const VehicleParams& p,
                          double floor_deg = 1.5,
                          double u_max = std::numbers::pi / 6.0) {
  const double inner_deg = std::max(10.0 - 7.0 * v_x * v_x / 40.0, floor_deg);
  const double inner = inner_deg * std::numbers::pi / 180.0;
  const double lim = std::atan((p.a + p.b) * std::tan(inner) / p.a);
  return std::clamp(lim, 0.0, u_max);
}

/// Admissible speed profile: pointwise min(requested, curve limit), then a
/// backward pass bounding deceleration so the vehicle can slow down before
/// each curve rather than inside it. Sizes of `requested` and `road` must
/// match and stations must be non-decreasing.
inline std::vector<double> plan_speed(const std::vector<double>& requested,
                                      const std::vector<RoadPoint>& road,
                                      double a_max = 3.0) {
  if (requested.size() != road.size())
    throw std::invalid_argument("plan_speed: profile/road size mismatch");
  if (!(a_max > 0.0)) throw std::invalid_argument("plan_speed: a_max must be > 0");

  std::vector<double> v(requested.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::min(requested[i], max_curve_speed(road[i]));

  for (std::size_t i = v.size(); i-- > 1;) {
    const double ds = road[i].s - road[i - 1].s;
    if (ds < 0.0) throw std::invalid_argument("plan_speed: stations not sorted");
    const double reachable = std::sqrt(v[i] * v[i] + 2.0 * a_max * ds);
    v[i - 1] = std::min(v[i - 1], reachable);
  }
  return v;
}

}  // namespace vdc
