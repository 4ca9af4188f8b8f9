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

#include <cmath>
#include <stdexcept>
#include <string>

namespace vdc {

inline constexpr double kGravity = 9.81;  // [m/s^2]

/// Magic-formula coefficients for one axle. The force produced is
///   F = F_z * D * sin(C * atan(B*k - E*(B*k - atan(B*k))))
/// with k the slip angle in radians.
struct PacejkaCoeffs {
  double B = 10.0;  // stiffness factor
  double C = 1.9;   // shape factor
  double D = 1.0;   // peak factor (units of mu)
  double E = 0.97;  // curvature factor
};

/// Physical constants of the simulated vehicle. Defaults describe the
/// 1575 kg single-speed electric passenger car used by the shipped scenarios.
struct VehicleParams {
  // body and resistances
  double m = 1575.0;       // curb mass [kg]
  double C_d = 0.29;       // aerodynamic drag coefficient [-]
  double C_r = 0.007;      // rolling resistance coefficient [-]
  double A_f = 1.6;        // frontal area [m^2]
  double rho_air = 1.222;  // air density [kg/m^3]

  // driveline
  double k_g = 3.4;       // fixed gear ratio [-]
  double R_w = 0.329;     // wheel rolling radius [m]
  double I_w = 0.8;       // wheel spin inertia [kg m^2]
  double B_d = 0.001;     // wheel viscous damping [N m s]
  double eta = 0.95;      // motor/inverter efficiency [-]
  double T_e_max = 250.0; // motor torque saturation [N m]
  double tau_e = 0.2;     // torque actuator lag [s]
  double u_b = 350.0;     // battery bus voltage [V], monitoring only

  // service brake (disc)
  double f_b = 0.9;           // pad friction coefficient [-]
  double R_m = 0.1778;        // effective pad radius [m]
  double B_a = 0.05;          // actuator piston diameter [m]
  double brake_p_max = 4.0e6; // pedal = 1 maps to this pressure [Pa]

  // planar geometry and yaw inertia
  double a = 1.6;      // CG to front axle [m]
  double b = 1.2;      // CG to rear axle [m]
  double I_z = 2875.0; // yaw inertia [kg m^2]

  PacejkaCoeffs tire_front{};
  PacejkaCoeffs tire_rear{};

  /// Static normal load carried by the front axle [N].
  double front_axle_load() const { return m * kGravity * b / (a + b); }
  /// Static normal load carried by the rear axle [N].
  double rear_axle_load() const { return m * kGravity * a / (a + b); }

  /// Small-slip cornering stiffness of the front axle [N/rad]:
  /// the slope of the magic formula at zero slip times the static load.
  double c_f_true() const {
    return front_axle_load() * tire_front.B * tire_front.C * tire_front.D;
  }
  /// Small-slip cornering stiffness of the rear axle [N/rad].
  double c_r_true() const {
    return rear_axle_load() * tire_rear.B * tire_rear.C * tire_rear.D;
  }

  /// Throws std::invalid_argument if any physical constant is out of range.
  void validate() const {
    auto require = [](bool ok, const std::string& what) {
      if (!ok) throw std::invalid_argument("VehicleParams: " + what);
    };
    require(m > 0.0, "mass must be positive");
    require(A_f > 0.0, "frontal area must be positive");
    require(rho_air > 0.0, "air density must be positive");
    require(C_d >= 0.0 && C_r >= 0.0, "resistance coefficients must be >= 0");
    require(k_g > 0.0, "gear ratio must be positive");
    require(R_w > 0.0, "wheel radius must be positive");
    require(I_w >= 0.0, "wheel inertia must be >= 0");
    require(B_d >= 0.0, "wheel damping must be >= 0");
    require(eta > 0.0 && eta <= 1.0, "efficiency must be in (0, 1]");
    require(T_e_max > 0.0, "torque limit must be positive");
    require(tau_e > 0.0, "torque lag must be positive");
    require(u_b > 0.0, "bus voltage must be positive");
    require(f_b > 0.0 && R_m > 0.0 && B_a > 0.0, "brake geometry must be positive");
    require(brake_p_max > 0.0, "brake pressure scale must be positive");
    require(a > 0.0 && b > 0.0, "axle distances must be positive");
    require(I_z > 0.0, "yaw inertia must be positive");
    for (const auto* t : {&tire_front, &tire_rear}) {
      require(t->B > 0.0 && t->C > 0.0 && t->D > 0.0, "tire B, C, D must be positive");
    }
  }
};

}  // namespace vdc
