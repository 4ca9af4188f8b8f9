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
#include <stdexcept>

#include "vdc/lpv.hpp"

namespace vdc {

struct RlsConfig {
  double lambda = 0.995;          // forgetting factor, (0, 1]
  Eigen::Vector2d theta0{8.0e4, 8.0e4};  // initial [c_f, c_r] [N/rad]
  double p0 = 1.0e6;              // initial covariance scale
  StiffnessBounds clamp{};        // estimate clamp [N/rad]
  double slip_deadband = 1.0e-3;  // skip channel below this |alpha| [rad]
  double p_blowup = 1.0e12;       // trace(P) beyond this triggers a reset

  void validate() const {
    if (!(lambda > 0.0 && lambda <= 1.0))
      throw std::invalid_argument("RlsConfig: lambda must be in (0, 1]");
    if (!(p0 > 0.0)) throw std::invalid_argument("RlsConfig: p0 must be > 0");
    if (!(clamp.lo > 0.0 && clamp.hi > clamp.lo))
      throw std::invalid_argument("RlsConfig: bad clamp bounds");
  }
};

/// Per-update report: identification errors (innovations) before the
/// parameter correction, which channels actually updated, and whether the
/// covariance blow-up guard fired.
struct RlsUpdateInfo {
  Eigen::Vector2d innovation = Eigen::Vector2d::Zero();
  bool updated_front = false;
  bool updated_rear = false;
  bool reset = false;
};

/// Recursive least-squares estimator of the axle cornering stiffnesses from
/// measured lateral forces and slip angles. The regressor is diagonal
/// (F_f depends only on alpha_f, F_r only on alpha_r), so the recursion
/// decouples into two scalar channels sharing one config.
class RlsEstimator {
 public:
  explicit RlsEstimator(const RlsConfig& cfg = {}) : cfg_(cfg) {
    cfg_.validate();
    reset();
  }

  void reset() {
    theta_ = cfg_.theta0;
    P_ = Eigen::Matrix2d::Identity() * cfg_.p0;
    n_updates_ = 0;
    reset_count_ = 0;
  }

  /// One measurement pair. Channels inside the slip dead-band are skipped.
  /// Throws on non-finite inputs.
  RlsUpdateInfo update(double F_f, double F_r, double alpha_f, double alpha_r) {
    if (!std::isfinite(F_f) || !std::isfinite(F_r) || !std::isfinite(alpha_f) ||
        !std::isfinite(alpha_r))
      throw std::invalid_argument("RlsEstimator: non-finite measurement");

    RlsUpdateInfo info;
    info.updated_front = update_channel(0, alpha_f, F_f, info.innovation(0));
    info.updated_rear = update_channel(1, alpha_r, F_r, info.innovation(1));
    if (info.updated_front || info.updated_rear) ++n_updates_;

    if (P_.trace() > cfg_.p_blowup) {
      P_ = Eigen::Matrix2d::Identity() * cfg_.p0;
      ++reset_count_;
      info.reset = true;
    }
    return info;
  }

  const Eigen::Vector2d& theta() const { return theta_; }
  double c_f_hat() const { return theta_(0); }
  double c_r_hat() const { return theta_(1); }
  const Eigen::Matrix2d& covariance() const { return P_; }
  long n_updates() const { return n_updates_; }
  long reset_count() const { return reset_count_; }
  const RlsConfig& config() const { return cfg_; }

 private:
  // Scalar RLS on channel i: z = theta_i * phi + e. The covariance update
  // P' = P/(lambda + phi^2 P) keeps P > 0 for any phi.
  bool update_channel(int i, double phi, double z, double& innovation) {
    innovation = z - theta_(i) * phi;
    if (std::abs(phi) < cfg_.slip_deadband) return false;
    const double p = P_(i, i);
    const double denom = cfg_.lambda + phi * phi * p;
    const double gain = p * phi / denom;
    theta_(i) += gain * innovation;
    theta_(i) = std::clamp(theta_(i), cfg_.clamp.lo, cfg_.clamp.hi);
    P_(i, i) = p / denom;
    return true;
  }

  RlsConfig cfg_;
  Eigen::Vector2d theta_ = Eigen::Vector2d::Zero();
  Eigen::Matrix2d P_ = Eigen::Matrix2d::Identity();
  long n_updates_ = 0;
  long reset_count_ = 0;
};

}  // namespace vdc
