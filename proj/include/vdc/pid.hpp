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
#include <stdexcept>
#include <utility>

namespace vdc {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

struct PidConfig {
  PidGains gains{};
  double out_min = -1.0;
  double out_max = 1.0;
  double deriv_tau = 0.05;  // derivative low-pass time constant [s]
};

/// Discrete PID on the speed error: trapezoidal integral, filtered
/// backward-difference derivative on the error, conditional integration
/// while saturated. Output is the signed accelerate/brake demand in [-1, 1].
class SpeedPid {
 public:
  explicit SpeedPid(const PidConfig& cfg = {}) : cfg_(cfg) {
    if (!(cfg_.out_max > cfg_.out_min))
      throw std::invalid_argument("SpeedPid: out_max must exceed out_min");
    if (!(cfg_.deriv_tau >= 0.0))
      throw std::invalid_argument("SpeedPid: deriv_tau must be >= 0");
  }

  void reset() {
    integral_ = 0.0;
    prev_error_ = 0.0;
    deriv_filt_ = 0.0;
    primed_ = false;
  }

  /// One controller period. Throws on dt <= 0.
  double control(double v_ref, double v, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("SpeedPid: dt must be > 0");
    const double e = v_ref - v;
    if (!primed_) {
      prev_error_ = e;  // first sample: no derivative kick, rectangle integral
      primed_ = true;
    }

    const double raw_deriv = (e - prev_error_) / dt;
    deriv_filt_ += dt / (cfg_.deriv_tau + dt) * (raw_deriv - deriv_filt_);

    const double p = cfg_.gains.kp * e;
    const double d = cfg_.gains.kd * deriv_filt_;
    const double candidate =
        integral_ + cfg_.gains.ki * dt * 0.5 * (e + prev_error_);

    // accept the new integral only if it does not push (or hold) the output
    // past saturation in its own direction
    const double unsat = p + candidate + d;
    const bool windup_hi = unsat > cfg_.out_max && candidate > integral_;
    const bool windup_lo = unsat < cfg_.out_min && candidate < integral_;
    if (!windup_hi && !windup_lo) integral_ = candidate;

    prev_error_ = e;
    return std::clamp(p + integral_ + d, cfg_.out_min, cfg_.out_max);
  }

  const PidConfig& config() const { return cfg_; }
  double integral() const { return integral_; }

 private:
  PidConfig cfg_;
  double integral_ = 0.0;
  double prev_error_ = 0.0;
  double deriv_filt_ = 0.0;
  bool primed_ = false;
};

/// Sign rule routing one signed demand to exactly one actuator.
inline std::pair<double, double> switch_logic(double command) {
  if (!std::isfinite(command))
    throw std::invalid_argument("switch_logic: non-finite command");
  const double c = std::clamp(command, -1.0, 1.0);
  return c >= 0.0 ? std::pair{c, 0.0} : std::pair{0.0, -c};
}

/// Stateful wrapper around switch_logic with a +-band around zero: once an
/// actuator is selected, the other takes over only when the command crosses
/// the band, preventing throttle/brake chatter on noisy near-zero demands.
class ThrottleBrakeSwitch {
 public:
  explicit ThrottleBrakeSwitch(double band = 0.02) : band_(band) {
    if (!(band_ >= 0.0))
      throw std::invalid_argument("ThrottleBrakeSwitch: band must be >= 0");
  }

  std::pair<double, double> apply(double command) {
    if (!std::isfinite(command))
      throw std::invalid_argument("ThrottleBrakeSwitch: non-finite command");
    const double c = std::clamp(command, -1.0, 1.0);
    if (throttle_mode_ && c < -band_) throttle_mode_ = false;
    if (!throttle_mode_ && c > band_) throttle_mode_ = true;
    // inside the band the active actuator coasts at zero demand
    if (throttle_mode_) return {std::max(c, 0.0), 0.0};
    return {0.0, std::max(-c, 0.0)};
  }

  bool throttle_mode() const { return throttle_mode_; }

 private:
  double band_;
  bool throttle_mode_ = true;
};

}  // namespace vdc
