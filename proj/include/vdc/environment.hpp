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
#include <numbers>
#include <stdexcept>

namespace vdc {

/// Time-varying wind: superposition of two sinusoidal gusts on a mean speed,
/// with a heading that rotates at a constant rate. Speed is clipped at zero.
/// `heading` is the compass direction the wind blows TOWARD, in the global
/// frame (same frame as the vehicle yaw angle).
struct WindProfile {
  double base = 0.0;          // mean speed [m/s]
  double gust1 = 0.0;         // primary gust amplitude [m/s]
  double gust1_period = 20.0; // [s]
  double gust2 = 0.0;         // secondary gust amplitude [m/s]
  double gust2_period = 6.0;  // [s]
  double phase = 0.0;         // primary gust phase [rad]
  double heading0 = 0.0;      // heading at t = 0 [rad]
  double heading_rate = 0.0;  // [rad/s]

  double speed(double t) const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double s = base;
    if (gust1 != 0.0) s += gust1 * std::sin(two_pi * t / gust1_period + phase);
    if (gust2 != 0.0) s += gust2 * std::sin(two_pi * t / gust2_period);
    return std::max(s, 0.0);
  }

  double heading(double t) const { return heading0 + heading_rate * t; }
};

/// Instantaneous wind sample in the global frame.
struct WindSample {
  double speed = 0.0;    // [m/s], >= 0
  double heading = 0.0;  // blows-toward direction [rad]
};

/// Ambient conditions seen by the plant. Grade and camber are treated as
/// constant over a scenario; wind varies with time.
struct Environment {
  double theta = 0.0;         // road grade angle [rad], uphill positive
  double mu = 0.95;           // tire-road adhesion coefficient [-]
  double phi_r = 0.0;         // road camber (bank) angle [rad]
  double cd_side_area = 1.0;  // lateral drag area product Cd*A [m^2]
  WindProfile wind{};

  WindSample wind_at(double t) const { return {wind.speed(t), wind.heading(t)}; }

  void validate() const {
    if (!(mu > 0.0 && mu <= 1.2))
      throw std::invalid_argument("Environment: mu must be in (0, 1.2]");
    if (std::abs(theta) >= std::numbers::pi / 2)
      throw std::invalid_argument("Environment: grade angle out of range");
    if (cd_side_area < 0.0)
      throw std::invalid_argument("Environment: side drag area must be >= 0");
  }
};

/// Component of the wind along the vehicle's longitudinal axis, signed so
/// that a headwind (opposing travel) is positive: it adds to the apparent
/// airspeed in the drag term.
inline double longitudinal_wind(const WindSample& w, double psi) {
  return -w.speed * std::cos(w.heading - psi);
}

/// Component of the wind along the vehicle's lateral (left-positive) axis.
inline double lateral_wind(const WindSample& w, double psi) {
  return w.speed * std::sin(w.heading - psi);
}

}  // namespace vdc
