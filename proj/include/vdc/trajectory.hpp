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
#include <variant>
#include <vector>

namespace vdc {

/// Smoothstep with zero first and second derivatives at both ends,
/// q(u) = 6u^5 - 15u^4 + 10u^3 on [0, 1].
inline double quintic_step(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return ((6.0 * u - 15.0) * u + 10.0) * u * u * u;
}
inline double quintic_step_d1(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return ((30.0 * u - 60.0) * u + 30.0) * u * u;
}
inline double quintic_step_d2(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return ((120.0 * u - 180.0) * u + 60.0) * u;
}

/// One smooth lateral offset change starting at station `start`, completing
/// over `length` meters.
struct LaneMove {
  double start = 0.0;   // [m]
  double length = 1.0;  // [m], > 0
  double offset = 0.0;  // signed lateral change [m]
};

/// Centerline built from superposed quintic lane moves: y(s) is C2, so the
/// reference heading and curvature are available analytically everywhere.
class LaneMovePath {
 public:
  LaneMovePath() = default;
  LaneMovePath(std::vector<LaneMove> moves, double end_station)
      : moves_(std::move(moves)), end_(end_station) {
    for (const auto& mv : moves_)
      if (!(mv.length > 0.0))
        throw std::invalid_argument("LaneMovePath: move length must be > 0");
    if (!(end_ > 0.0)) throw std::invalid_argument("LaneMovePath: end must be > 0");
  }

  double y(double s) const {
    double v = 0.0;
    for (const auto& mv : moves_) v += mv.offset * quintic_step((s - mv.start) / mv.length);
    return v;
  }
  double dy(double s) const {
    double v = 0.0;
    for (const auto& mv : moves_)
      v += mv.offset / mv.length * quintic_step_d1((s - mv.start) / mv.length);
    return v;
  }
  double d2y(double s) const {
    double v = 0.0;
    for (const auto& mv : moves_)
      v += mv.offset / (mv.length * mv.length) *
           quintic_step_d2((s - mv.start) / mv.length);
    return v;
  }

  double end_station() const { return end_; }
  const std::vector<LaneMove>& moves() const { return moves_; }

 private:
  std::vector<LaneMove> moves_;
  double end_ = 1.0;
};

/// Centerline through sampled (station, y) waypoints, interpolated with a
/// cubic Hermite spline whose slopes come from three-point finite
/// differences: C1 everywhere, which is enough to supply a continuous
/// reference heading.
class WaypointPath {
 public:
  WaypointPath() = default;
  WaypointPath(std::vector<double> stations, std::vector<double> y)
      : s_(std::move(stations)), y_(std::move(y)) {
    if (s_.size() != y_.size() || s_.size() < 2)
      throw std::invalid_argument("WaypointPath: need >= 2 matching samples");
    for (std::size_t i = 1; i < s_.size(); ++i)
      if (!(s_[i] > s_[i - 1]))
        throw std::invalid_argument("WaypointPath: stations must increase");
    slopes_.resize(s_.size());
    const std::size_t n = s_.size();
    slopes_[0] = (y_[1] - y_[0]) / (s_[1] - s_[0]);
    slopes_[n - 1] = (y_[n - 1] - y_[n - 2]) / (s_[n - 1] - s_[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i)
      slopes_[i] = (y_[i + 1] - y_[i - 1]) / (s_[i + 1] - s_[i - 1]);
  }

  double y(double s) const { return eval(s, 0); }
  double dy(double s) const { return eval(s, 1); }
  double d2y(double s) const { return eval(s, 2); }
  double end_station() const { return s_.back(); }

 private:
  double eval(double s, int deriv) const {
    if (s <= s_.front()) s = s_.front();
    if (s >= s_.back()) s = s_.back();
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    const std::size_t i =
        std::min<std::size_t>(std::max<std::ptrdiff_t>(it - s_.begin() - 1, 0),
                              s_.size() - 2);
    const double h = s_[i + 1] - s_[i];
    const double t = (s - s_[i]) / h;
    const double y0 = y_[i], y1 = y_[i + 1];
    const double m0 = slopes_[i] * h, m1 = slopes_[i + 1] * h;
    // Hermite basis in t, derivatives rescaled by the segment width
    if (deriv == 0) {
      const double t2 = t * t, t3 = t2 * t;
      return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
             (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
    }
    if (deriv == 1) {
      const double t2 = t * t;
      return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 +
              (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) /
             h;
    }
    return ((12 * t - 6) * y0 + (6 * t - 4) * m0 + (-12 * t + 6) * y1 +
            (6 * t - 2) * m1) /
           (h * h);
  }

  std::vector<double> s_;
  std::vector<double> y_;
  std::vector<double> slopes_;
};

/// Reference centerline y_ref(s) with derived heading and curvature.
class ReferencePath {
 public:
  ReferencePath() : impl_(LaneMovePath({}, 1000.0)) {}
  explicit ReferencePath(LaneMovePath p) : impl_(std::move(p)) {}
  explicit ReferencePath(WaypointPath p) : impl_(std::move(p)) {}

  double y(double s) const {
    return std::visit([&](const auto& p) { return p.y(s); }, impl_);
  }
  double heading(double s) const {
    return std::atan(std::visit([&](const auto& p) { return p.dy(s); }, impl_));
  }
  double curvature(double s) const {
    const auto [d1, d2] = std::visit(
        [&](const auto& p) { return std::pair{p.dy(s), p.d2y(s)}; }, impl_);
    return d2 / std::pow(1.0 + d1 * d1, 1.5);
  }
  double end_station() const {
    return std::visit([](const auto& p) { return p.end_station(); }, impl_);
  }

  bool is_lane_moves() const { return std::holds_alternative<LaneMovePath>(impl_); }
  const LaneMovePath* lane_moves() const { return std::get_if<LaneMovePath>(&impl_); }
  const WaypointPath* waypoints() const { return std::get_if<WaypointPath>(&impl_); }

 private:
  std::variant<LaneMovePath, WaypointPath> impl_;
};

/// Piecewise-linear speed demand v_d(t), clamped to the end samples outside
/// the sampled range.
class SpeedProfile {
 public:
  SpeedProfile() : t_{0.0}, v_{0.0} {}
  SpeedProfile(std::vector<double> t, std::vector<double> v)
      : t_(std::move(t)), v_(std::move(v)) {
    if (t_.size() != v_.size() || t_.empty())
      throw std::invalid_argument("SpeedProfile: need matching non-empty samples");
    for (std::size_t i = 1; i < t_.size(); ++i)
      if (!(t_[i] > t_[i - 1]))
        throw std::invalid_argument("SpeedProfile: times must increase");
    for (double s : v_)
      if (!(s >= 0.0)) throw std::invalid_argument("SpeedProfile: speeds must be >= 0");
  }

  double operator()(double t) const {
    if (t <= t_.front()) return v_.front();
    if (t >= t_.back()) return v_.back();
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
    const double u = (t - t_[i]) / (t_[i + 1] - t_[i]);
    return v_[i] + u * (v_[i + 1] - v_[i]);
  }

  double max_value() const { return *std::max_element(v_.begin(), v_.end()); }
  const std::vector<double>& times() const { return t_; }
  const std::vector<double>& values() const { return v_; }

 private:
  std::vector<double> t_;
  std::vector<double> v_;
};

}  // namespace vdc
