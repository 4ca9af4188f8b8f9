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

#include "vdc/environment.hpp"
#include "vdc/vehicle.hpp"

namespace vdc {

/// Lateral dynamics are frozen below this speed: the slip-angle expressions
/// divide by v_x.
inline constexpr double kLateralSpeedFloor = 0.5;  // [m/s]

/// Full simulator state. omega_w is slaved to v_x (no longitudinal slip) and
/// I_b is a monitoring output refreshed after each step.
struct PlantState {
  double v_x = 0.0;      // longitudinal velocity [m/s], >= 0
  double v_y = 0.0;      // lateral velocity, body frame [m/s]
  double psi = 0.0;      // heading [rad]
  double psi_dot = 0.0;  // yaw rate [rad/s]
  double x_g = 0.0;      // global position [m]
  double y_g = 0.0;      // global position [m]
  double omega_w = 0.0;  // wheel speed [rad/s], = v_x / R_w
  double T_e = 0.0;      // motor torque actuator state [N m]
  double I_b = 0.0;      // battery current [A], monitoring only
};

/// Normalized driver commands plus the front steering angle.
struct PlantInput {
  double throttle = 0.0;  // [0, 1]
  double brake = 0.0;     // [0, 1]
  double steer = 0.0;     // front wheel angle [rad]
};

/// Axle slip angles and Pacejka forces at the current state, the measurement
/// feed for the stiffness estimator. `valid` is false below the speed floor
/// where slip angles are undefined.
struct LateralTruth {
  double alpha_f = 0.0;  // front slip angle [rad]
  double alpha_r = 0.0;  // rear slip angle [rad]
  double F_f = 0.0;      // front axle lateral force [N]
  double F_r = 0.0;      // rear axle lateral force [N]
  bool valid = false;
};

/// Speed-dependent resistive force: aerodynamic drag on the apparent
/// airspeed (headwind positive), rolling resistance and grade.
inline double longitudinal_forces(const PlantState& state, const VehicleParams& p,
                                  const Environment& env, double t) {
  const double v_w = longitudinal_wind(env.wind_at(t), state.psi);
  const double v_air = state.v_x + v_w;
  return 0.5 * p.rho_air * p.C_d * p.A_f * v_air * v_air +
         p.m * kGravity * p.C_r * std::cos(env.theta) +
         p.m * kGravity * std::sin(env.theta);
}

/// Tractive force at the contact patch from post-gearbox wheel torque T,
/// net of wheel damping and wheel spin-up inertia.
inline double drive_force(double T, double omega_w, double omega_w_dot,
                          const VehicleParams& p) {
  return (T - p.B_d * omega_w - p.I_w * omega_w_dot) / p.R_w;
}

/// Magic-formula lateral force for slip angle k [rad] under normal load F_z.
inline double pacejka_force(double k, double F_z, const PacejkaCoeffs& c) {
  const double Bk = c.B * k;
  return F_z * c.D * std::sin(c.C * std::atan(Bk - c.E * (Bk - std::atan(Bk))));
}

/// Disc-brake torque for line pressure P [Pa]. Throws on negative pressure.
inline double brake_torque(double P, const VehicleParams& p) {
  if (P < 0.0) throw std::invalid_argument("brake_torque: negative pressure");
  return p.f_b * P * std::numbers::pi * p.B_a * p.B_a * p.R_m / 2.0;
}

inline LateralTruth lateral_truth(const PlantState& s, double steer,
                                  const VehicleParams& p) {
  LateralTruth out;
  if (s.v_x < kLateralSpeedFloor) return out;
  out.alpha_f = steer - (s.v_y + p.a * s.psi_dot) / s.v_x;
  out.alpha_r = -(s.v_y - p.b * s.psi_dot) / s.v_x;
  out.F_f = pacejka_force(out.alpha_f, p.front_axle_load(), p.tire_front);
  out.F_r = pacejka_force(out.alpha_r, p.rear_axle_load(), p.tire_rear);
  out.valid = true;
  return out;
}

namespace detail {

// Time derivative of the integrated states for fixed inputs.
struct StateDeriv {
  double v_x = 0, v_y = 0, psi = 0, psi_dot = 0, x_g = 0, y_g = 0, T_e = 0;
};

inline StateDeriv plant_deriv(const PlantState& s, const PlantInput& u,
                              const VehicleParams& p, const Environment& env,
                              double t) {
  StateDeriv d;

  // torque actuator lag toward the commanded torque
  const double T_cmd = std::clamp(u.throttle, 0.0, 1.0) * p.T_e_max;
  d.T_e = (T_cmd - s.T_e) / p.tau_e;

  // longitudinal balance with wheel inertia folded into the effective mass
  const double omega_w = s.v_x / p.R_w;
  const double T_b = brake_torque(std::clamp(u.brake, 0.0, 1.0) * p.brake_p_max, p);
  const double T_wheel = p.k_g * s.T_e - T_b;
  const double F_x = drive_force(T_wheel, omega_w, 0.0, p);
  const double resist = longitudinal_forces(s, p, env, t);
  const double m_eff = p.m + p.I_w / (p.R_w * p.R_w);
  d.v_x = (F_x - resist) / m_eff;
  if (s.v_x <= 0.0 && d.v_x < 0.0) d.v_x = 0.0;  // brakes cannot reverse

  if (s.v_x >= kLateralSpeedFloor) {
    const LateralTruth lt = lateral_truth(s, u.steer, p);
    const double v_wl = lateral_wind(env.wind_at(t), s.psi);
    const double F_wind =
        0.5 * p.rho_air * env.cd_side_area * v_wl * v_wl * (v_wl < 0.0 ? -1.0 : 1.0);
    d.v_y = (2.0 * (lt.F_f + lt.F_r) + F_wind) / p.m - s.v_x * s.psi_dot;
    d.psi_dot = 2.0 * (p.a * lt.F_f - p.b * lt.F_r) / p.I_z;
  }

  d.psi = s.psi_dot;
  d.x_g = s.v_x * std::cos(s.psi) - s.v_y * std::sin(s.psi);
  d.y_g = s.v_x * std::sin(s.psi) + s.v_y * std::cos(s.psi);
  return d;
}

inline PlantState advance(const PlantState& s, const StateDeriv& d, double h) {
  PlantState n = s;
  n.v_x += h * d.v_x;
  n.v_y += h * d.v_y;
  n.psi += h * d.psi;
  n.psi_dot += h * d.psi_dot;
  n.x_g += h * d.x_g;
  n.y_g += h * d.y_g;
  n.T_e += h * d.T_e;
  return n;
}

}  // namespace detail

/// Advances the plant by one RK4 step of length dt under zero-order-held
/// inputs. Wind is sampled at the stage times. Throws on dt <= 0.
inline PlantState step(const PlantState& s, const PlantInput& u,
                       const VehicleParams& p, const Environment& env, double t,
                       double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("plant step: dt must be > 0");

  using detail::advance;
  using detail::plant_deriv;
  const auto k1 = plant_deriv(s, u, p, env, t);
  const auto k2 = plant_deriv(advance(s, k1, dt / 2), u, p, env, t + dt / 2);
  const auto k3 = plant_deriv(advance(s, k2, dt / 2), u, p, env, t + dt / 2);
  const auto k4 = plant_deriv(advance(s, k3, dt), u, p, env, t + dt);

  PlantState n = s;
  auto mix = [&](double a1, double a2, double a3, double a4) {
    return dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  };
  n.v_x += mix(k1.v_x, k2.v_x, k3.v_x, k4.v_x);
  n.v_y += mix(k1.v_y, k2.v_y, k3.v_y, k4.v_y);
  n.psi += mix(k1.psi, k2.psi, k3.psi, k4.psi);
  n.psi_dot += mix(k1.psi_dot, k2.psi_dot, k3.psi_dot, k4.psi_dot);
  n.x_g += mix(k1.x_g, k2.x_g, k3.x_g, k4.x_g);
  n.y_g += mix(k1.y_g, k2.y_g, k3.y_g, k4.y_g);
  n.T_e += mix(k1.T_e, k2.T_e, k3.T_e, k4.T_e);

  n.v_x = std::max(n.v_x, 0.0);
  n.T_e = std::clamp(n.T_e, -p.T_e_max, p.T_e_max);
  n.omega_w = n.v_x / p.R_w;

  // battery current monitor: motor mechanical power over bus voltage, with
  // the efficiency applied when the motor drives (k = 1) and not when it is
  // back-driven (k = 0)
  const double omega_g = p.k_g * n.omega_w;
  const double power = n.T_e * omega_g;
  n.I_b = power / (p.u_b * (power >= 0.0 ? p.eta : 1.0));
  return n;
}

}  // namespace vdc
