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

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vdc/vehicle.hpp"

namespace vdc {

/// Speed floor for the scheduling vector; the model divides by v_x.
inline constexpr double kVxFloor = 0.5;  // [m/s]

/// Clamp range for the scheduled cornering stiffnesses [N/rad].
struct StiffnessBounds {
  double lo = 1.0e4;
  double hi = 2.0e5;
};

/// Lateral model state X = [y_dot, psi, psi_dot, y].
struct LateralState {
  double y_dot = 0.0;    // lateral velocity [m/s]
  double psi = 0.0;      // heading [rad], wrapped to (-pi, pi]
  double psi_dot = 0.0;  // yaw rate [rad/s]
  double y = 0.0;        // lateral position [m]

  static double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::remainder(a, two_pi);
    if (a <= -std::numbers::pi) a += two_pi;
    return a;
  }

  Eigen::Vector4d vec() const { return {y_dot, wrap_angle(psi), psi_dot, y}; }
};

/// Scheduling vector rho = [v_x, c_f/v_x, c_r/v_x, c_f]. Construct through
/// from_raw so the ratio fields and bounds hold by construction.
struct SchedulingVector {
  double v_x = kVxFloor;
  double cf_over_vx = 0.0;
  double cr_over_vx = 0.0;
  double c_f = 0.0;

  double c_r() const { return cr_over_vx * v_x; }

  static SchedulingVector from_raw(double v_x_raw, double c_f_raw, double c_r_raw,
                                   const StiffnessBounds& bounds = {}) {
    SchedulingVector rho;
    rho.v_x = std::max(v_x_raw, kVxFloor);
    const double cf = std::clamp(c_f_raw, bounds.lo, bounds.hi);
    const double cr = std::clamp(c_r_raw, bounds.lo, bounds.hi);
    rho.c_f = cf;
    rho.cf_over_vx = cf / rho.v_x;
    rho.cr_over_vx = cr / rho.v_x;
    return rho;
  }
};

/// Continuous-time lateral model X' = A X + B u, Y = C X with
/// Y = [y, psi] and u the front steering angle.
struct ContinuousLpv {
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  Eigen::Vector4d B = Eigen::Vector4d::Zero();
  Eigen::Matrix<double, 2, 4> C = Eigen::Matrix<double, 2, 4>::Zero();
  SchedulingVector rho;
};

/// Forward-Euler discretization of a ContinuousLpv, A_d = I + T_s A and
/// B_d = T_s B by definition. Matrices are dynamically sized so prediction
/// code also accepts reduced-order test models.
struct LtiInstance {
  Eigen::MatrixXd A_c, B_c, C;
  Eigen::MatrixXd A_d, B_d;
  double T_s = 0.0;
  SchedulingVector rho;
};

/// Builds A(rho), B(rho), C. Every A entry is affine in the components of
/// rho, which is why the ratio fields (not c/v_x recomputed here) feed the
/// off-diagonal terms. Throws if rho sits below the speed floor.
inline ContinuousLpv build_continuous(const SchedulingVector& rho,
                                      const VehicleParams& p) {
  if (!(rho.v_x >= kVxFloor))
    throw std::invalid_argument("build_continuous: scheduling speed below floor");

  ContinuousLpv m;
  m.rho = rho;
  const double cf_v = rho.cf_over_vx;
  const double cr_v = rho.cr_over_vx;

  m.A(0, 0) = -2.0 * (cf_v + cr_v) / p.m;
  m.A(0, 2) = -rho.v_x - 2.0 * (p.a * cf_v - p.b * cr_v) / p.m;
  m.A(1, 2) = 1.0;
  m.A(2, 0) = -2.0 * (p.a * cf_v - p.b * cr_v) / p.I_z;
  m.A(2, 2) = -2.0 * (p.a * p.a * cf_v + p.b * p.b * cr_v) / p.I_z;
  m.A(3, 0) = 1.0;
  m.A(3, 1) = rho.v_x;

  m.B(0) = 2.0 * rho.c_f / p.m;
  m.B(2) = 2.0 * rho.c_f * p.a / p.I_z;

  m.C(0, 3) = 1.0;  // y
  m.C(1, 1) = 1.0;  // psi
  return m;
}

/// Euler-discretizes the continuous model with period T_s. Throws on
/// non-positive T_s.
inline LtiInstance discretize(const ContinuousLpv& c, double T_s) {
  if (!(T_s > 0.0)) throw std::invalid_argument("discretize: T_s must be > 0");
  LtiInstance d;
  d.A_c = c.A;
  d.B_c = c.B;
  d.C = c.C;
  d.A_d = Eigen::Matrix4d::Identity() + T_s * c.A;
  d.B_d = T_s * c.B;
  d.T_s = T_s;
  d.rho = c.rho;
  return d;
}

}  // namespace vdc
