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
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vdc/envelope.hpp"
#include "vdc/environment.hpp"
#include "vdc/mpc.hpp"
#include "vdc/pid.hpp"
#include "vdc/pso.hpp"
#include "vdc/rls.hpp"
#include "vdc/trajectory.hpp"
#include "vdc/vehicle.hpp"

namespace vdc {

inline constexpr int kScenarioFormatVersion = 1;

/// Raised for malformed or inconsistent scenario definitions; the CLI maps
/// it to its own exit code.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Optional zero-mean Gaussian noise injected into the estimator's force and
/// slip measurements (the plant truth itself stays clean).
struct RlsNoise {
  double force_std = 0.0;  // [N]
  double slip_std = 0.0;   // [rad]
};

/// Everything one closed-loop run needs: world, references, and controller
/// settings. Loadable from a versioned JSON file; see docs in README.
struct Scenario {
  std::string name = "scenario";
  double duration = 10.0;  // [s]
  std::uint64_t seed = 1;

  VehicleParams vehicle{};
  Environment env{};
  ReferencePath path{};
  SpeedProfile speed{};

  RlsConfig rls{};
  RlsNoise rls_noise{};
  PidGains pid_gains{};
  MpcConfig mpc{};
  PsoConfig pso = default_gain_search();

  static PsoConfig default_gain_search() {
    PsoConfig c;
    c.bounds = {{0.0, 20.0}, {0.0, 2.0}, {0.0, 2.0}};  // kp, ki, kd
    return c;
  }

  /// Road description at a path station, for the envelope checks.
  RoadPoint road_at(double s) const {
    return {s, path.curvature(s), env.phi_r, env.mu};
  }

  /// Structural checks plus the planner consistency requirement: the
  /// demanded speed profile must already be admissible (curve speed limits
  /// and the deceleration-limited backward pass leave it unchanged).
  void validate() const {
    auto fail = [](const std::string& what) { throw ScenarioError("scenario: " + what); };
    if (!(duration > 0.0)) fail("duration must be > 0");
    try {
      vehicle.validate();
      env.validate();
      mpc.validate();
      rls.validate();
      pso.validate();
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    if (!(rls_noise.force_std >= 0.0 && rls_noise.slip_std >= 0.0))
      fail("noise std must be >= 0");
    // The lateral model is scheduled on 1/v_x and the plant's slip angles
    // divide by v_x, so standstill and creeping demands are out of scope.
    for (double v : speed.values())
      if (!(v >= 2.0 * kVxFloor))
        fail("demanded speed must stay >= " + std::to_string(2.0 * kVxFloor) + " m/s");

    const double dt = 0.1;
    std::vector<double> requested;
    std::vector<RoadPoint> road;
    double s = 0.0;
    double v_prev = speed(0.0);
    for (double t = 0.0; t <= duration + 1e-9; t += dt) {
      const double v = speed(t);
      if (t > 0.0) s += 0.5 * (v + v_prev) * dt;
      v_prev = v;
      requested.push_back(v);
      road.push_back(road_at(s));
    }
    const std::vector<double> admissible = plan_speed(requested, road);
    for (std::size_t i = 0; i < requested.size(); ++i)
      if (requested[i] > admissible[i] + 1e-6)
        fail("speed profile violates the admissible-speed envelope at t=" +
             std::to_string(i * dt) + " s");
  }
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& ctx) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ScenarioError("scenario: unknown key '" + item.key() + "' in " + ctx);
  }
}

inline double jget(const json& j, const char* key, double fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw ScenarioError(std::string("scenario: '") + key + "' must be a number");
  return it->get<double>();
}

}  // namespace detail

inline nlohmann::json scenario_to_json(const Scenario& sc) {
  using nlohmann::json;
  json j;
  j["format_version"] = kScenarioFormatVersion;
  j["name"] = sc.name;
  j["duration_s"] = sc.duration;
  j["seed"] = sc.seed;

  const VehicleParams def{};
  json veh = json::object();
  auto put_if = [&](const char* k, double v, double d) {
    if (v != d) veh[k] = v;
  };
  put_if("m", sc.vehicle.m, def.m);
  put_if("C_d", sc.vehicle.C_d, def.C_d);
  put_if("C_r", sc.vehicle.C_r, def.C_r);
  put_if("A_f", sc.vehicle.A_f, def.A_f);
  put_if("rho_air", sc.vehicle.rho_air, def.rho_air);
  put_if("k_g", sc.vehicle.k_g, def.k_g);
  put_if("R_w", sc.vehicle.R_w, def.R_w);
  put_if("I_w", sc.vehicle.I_w, def.I_w);
  put_if("B_d", sc.vehicle.B_d, def.B_d);
  put_if("eta", sc.vehicle.eta, def.eta);
  put_if("T_e_max", sc.vehicle.T_e_max, def.T_e_max);
  put_if("tau_e", sc.vehicle.tau_e, def.tau_e);
  put_if("u_b", sc.vehicle.u_b, def.u_b);
  put_if("f_b", sc.vehicle.f_b, def.f_b);
  put_if("R_m", sc.vehicle.R_m, def.R_m);
  put_if("B_a", sc.vehicle.B_a, def.B_a);
  put_if("brake_p_max", sc.vehicle.brake_p_max, def.brake_p_max);
  put_if("a", sc.vehicle.a, def.a);
  put_if("b", sc.vehicle.b, def.b);
  put_if("I_z", sc.vehicle.I_z, def.I_z);
  j["vehicle"] = veh;

  j["environment"] = {{"mu", sc.env.mu},
                      {"theta_rad", sc.env.theta},
                      {"phi_r_rad", sc.env.phi_r},
                      {"cd_side_area_m2", sc.env.cd_side_area}};
  j["wind"] = {{"base_mps", sc.env.wind.base},
               {"gust1_mps", sc.env.wind.gust1},
               {"gust1_period_s", sc.env.wind.gust1_period},
               {"gust2_mps", sc.env.wind.gust2},
               {"gust2_period_s", sc.env.wind.gust2_period},
               {"phase_rad", sc.env.wind.phase},
               {"heading0_rad", sc.env.wind.heading0},
               {"heading_rate_rad_s", sc.env.wind.heading_rate}};

  nlohmann::json ref;
  if (const LaneMovePath* lm = sc.path.lane_moves()) {
    ref["type"] = "lane_moves";
    ref["end_m"] = lm->end_station();
    ref["moves"] = json::array();
    for (const auto& mv : lm->moves())
      ref["moves"].push_back({{"start_m", mv.start},
                              {"length_m", mv.length},
                              {"offset_m", mv.offset}});
  } else {
    throw ScenarioError("scenario: waypoint paths serialize from files only");
  }
  j["reference"] = ref;

  j["speed_profile"] = {{"times_s", sc.speed.times()},
                        {"values_mps", sc.speed.values()}};

  j["rls"] = {{"lambda", sc.rls.lambda},
              {"theta0_f", sc.rls.theta0(0)},
              {"theta0_r", sc.rls.theta0(1)},
              {"p0", sc.rls.p0},
              {"slip_deadband_rad", sc.rls.slip_deadband},
              {"clamp_lo", sc.rls.clamp.lo},
              {"clamp_hi", sc.rls.clamp.hi},
              {"force_noise_std_n", sc.rls_noise.force_std},
              {"slip_noise_std_rad", sc.rls_noise.slip_std}};

  j["pid"] = {{"kp", sc.pid_gains.kp}, {"ki", sc.pid_gains.ki}, {"kd", sc.pid_gains.kd}};

  j["mpc"] = {{"np", sc.mpc.Np},
              {"nc", sc.mpc.Nc},
              {"q_y", sc.mpc.Q(0, 0)},
              {"q_psi", sc.mpc.Q(1, 1)},
              {"r", sc.mpc.R},
              {"beta", sc.mpc.beta},
              {"rho_slack", sc.mpc.rho_slack},
              {"eps_scale", sc.mpc.eps_scale},
              {"ts_s", sc.mpc.T_s},
              {"du_max_rad", sc.mpc.du_max},
              {"u_max_rad", sc.mpc.u_max},
              {"ydot_limit_mps", sc.mpc.x_max(0)},
              {"psidot_limit_rad_s", sc.mpc.x_max(2)},
              {"cost_mode", sc.mpc.cost_mode == CostMode::enhanced ? "enhanced" : "standard"}};

  json bounds = json::array();
  for (const auto& b : sc.pso.bounds) bounds.push_back({b[0], b[1]});
  j["pso"] = {{"particles", sc.pso.n_particles},
              {"generations", sc.pso.max_generations},
              {"omega_max", sc.pso.omega_max},
              {"omega_min", sc.pso.omega_min},
              {"lambda1", sc.pso.lambda1},
              {"lambda2", sc.pso.lambda2},
              {"c1_init", sc.pso.c1_init},
              {"c2_init", sc.pso.c2_init},
              {"gain_bounds", bounds}};
  return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  using detail::check_keys;
  using detail::jget;
  using nlohmann::json;

  if (!j.is_object()) throw ScenarioError("scenario: root must be an object");
  check_keys(j,
             {"format_version", "name", "duration_s", "seed", "vehicle",
              "environment", "wind", "reference", "speed_profile", "rls", "pid",
              "mpc", "pso"},
             "root");
  if (!j.contains("format_version") || !j["format_version"].is_number_integer())
    throw ScenarioError("scenario: missing integer format_version");
  if (j["format_version"].get<int>() != kScenarioFormatVersion)
    throw ScenarioError("scenario: unsupported format_version");

  Scenario sc;
  sc.name = j.value("name", sc.name);
  sc.duration = jget(j, "duration_s", sc.duration);
  if (j.contains("seed")) sc.seed = j["seed"].get<std::uint64_t>();

  if (j.contains("vehicle")) {
    const json& v = j["vehicle"];
    check_keys(v,
               {"m", "C_d", "C_r", "A_f", "rho_air", "k_g", "R_w", "I_w", "B_d",
                "eta", "T_e_max", "tau_e", "u_b", "f_b", "R_m", "B_a",
                "brake_p_max", "a", "b", "I_z"},
               "vehicle");
    VehicleParams& p = sc.vehicle;
    p.m = jget(v, "m", p.m);
    p.C_d = jget(v, "C_d", p.C_d);
    p.C_r = jget(v, "C_r", p.C_r);
    p.A_f = jget(v, "A_f", p.A_f);
    p.rho_air = jget(v, "rho_air", p.rho_air);
    p.k_g = jget(v, "k_g", p.k_g);
    p.R_w = jget(v, "R_w", p.R_w);
    p.I_w = jget(v, "I_w", p.I_w);
    p.B_d = jget(v, "B_d", p.B_d);
    p.eta = jget(v, "eta", p.eta);
    p.T_e_max = jget(v, "T_e_max", p.T_e_max);
    p.tau_e = jget(v, "tau_e", p.tau_e);
    p.u_b = jget(v, "u_b", p.u_b);
    p.f_b = jget(v, "f_b", p.f_b);
    p.R_m = jget(v, "R_m", p.R_m);
    p.B_a = jget(v, "B_a", p.B_a);
    p.brake_p_max = jget(v, "brake_p_max", p.brake_p_max);
    p.a = jget(v, "a", p.a);
    p.b = jget(v, "b", p.b);
    p.I_z = jget(v, "I_z", p.I_z);
  }

  if (j.contains("environment")) {
    const json& e = j["environment"];
    check_keys(e, {"mu", "theta_rad", "phi_r_rad", "cd_side_area_m2"}, "environment");
    sc.env.mu = jget(e, "mu", sc.env.mu);
    sc.env.theta = jget(e, "theta_rad", sc.env.theta);
    sc.env.phi_r = jget(e, "phi_r_rad", sc.env.phi_r);
    sc.env.cd_side_area = jget(e, "cd_side_area_m2", sc.env.cd_side_area);
  }

  if (j.contains("wind")) {
    const json& w = j["wind"];
    check_keys(w,
               {"base_mps", "gust1_mps", "gust1_period_s", "gust2_mps",
                "gust2_period_s", "phase_rad", "heading0_rad", "heading_rate_rad_s"},
               "wind");
    WindProfile& wp = sc.env.wind;
    wp.base = jget(w, "base_mps", wp.base);
    wp.gust1 = jget(w, "gust1_mps", wp.gust1);
    wp.gust1_period = jget(w, "gust1_period_s", wp.gust1_period);
    wp.gust2 = jget(w, "gust2_mps", wp.gust2);
    wp.gust2_period = jget(w, "gust2_period_s", wp.gust2_period);
    wp.phase = jget(w, "phase_rad", wp.phase);
    wp.heading0 = jget(w, "heading0_rad", wp.heading0);
    wp.heading_rate = jget(w, "heading_rate_rad_s", wp.heading_rate);
  }

  if (j.contains("reference")) {
    const json& r = j["reference"];
    check_keys(r, {"type", "end_m", "moves", "stations_m", "y_m"}, "reference");
    const std::string type = r.value("type", "lane_moves");
    try {
      if (type == "lane_moves") {
        std::vector<LaneMove> moves;
        if (r.contains("moves"))
          for (const auto& mj : r["moves"]) {
            check_keys(mj, {"start_m", "length_m", "offset_m"}, "reference.moves[]");
            moves.push_back({jget(mj, "start_m", 0.0), jget(mj, "length_m", 1.0),
                             jget(mj, "offset_m", 0.0)});
          }
        sc.path = ReferencePath(LaneMovePath(std::move(moves), jget(r, "end_m", 1000.0)));
      } else if (type == "waypoints") {
        if (!r.contains("stations_m") || !r.contains("y_m"))
          throw ScenarioError("scenario: waypoint reference needs stations_m and y_m");
        sc.path = ReferencePath(WaypointPath(r["stations_m"].get<std::vector<double>>(),
                                             r["y_m"].get<std::vector<double>>()));
      } else {
        throw ScenarioError("scenario: unknown reference type '" + type + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(std::string("scenario: bad reference: ") + e.what());
    }
  }

  if (j.contains("speed_profile")) {
    const json& sp = j["speed_profile"];
    check_keys(sp, {"times_s", "values_mps"}, "speed_profile");
    try {
      sc.speed = SpeedProfile(sp.at("times_s").get<std::vector<double>>(),
                              sp.at("values_mps").get<std::vector<double>>());
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(std::string("scenario: bad speed profile: ") + e.what());
    }
  }

  if (j.contains("rls")) {
    const json& r = j["rls"];
    check_keys(r,
               {"lambda", "theta0_f", "theta0_r", "p0", "slip_deadband_rad",
                "clamp_lo", "clamp_hi", "force_noise_std_n", "slip_noise_std_rad"},
               "rls");
    sc.rls.lambda = jget(r, "lambda", sc.rls.lambda);
    sc.rls.theta0(0) = jget(r, "theta0_f", sc.rls.theta0(0));
    sc.rls.theta0(1) = jget(r, "theta0_r", sc.rls.theta0(1));
    sc.rls.p0 = jget(r, "p0", sc.rls.p0);
    sc.rls.slip_deadband = jget(r, "slip_deadband_rad", sc.rls.slip_deadband);
    sc.rls.clamp.lo = jget(r, "clamp_lo", sc.rls.clamp.lo);
    sc.rls.clamp.hi = jget(r, "clamp_hi", sc.rls.clamp.hi);
    sc.rls_noise.force_std = jget(r, "force_noise_std_n", sc.rls_noise.force_std);
    sc.rls_noise.slip_std = jget(r, "slip_noise_std_rad", sc.rls_noise.slip_std);
  }

  if (j.contains("pid")) {
    const json& p = j["pid"];
    check_keys(p, {"kp", "ki", "kd"}, "pid");
    sc.pid_gains.kp = jget(p, "kp", 0.0);
    sc.pid_gains.ki = jget(p, "ki", 0.0);
    sc.pid_gains.kd = jget(p, "kd", 0.0);
  }

  if (j.contains("mpc")) {
    const json& m = j["mpc"];
    check_keys(m,
               {"np", "nc", "q_y", "q_psi", "r", "beta", "rho_slack", "eps_scale",
                "ts_s", "du_max_rad", "u_max_rad", "ydot_limit_mps",
                "psidot_limit_rad_s", "cost_mode"},
               "mpc");
    MpcConfig& c = sc.mpc;
    c.Np = static_cast<int>(jget(m, "np", c.Np));
    c.Nc = static_cast<int>(jget(m, "nc", jget(m, "np", c.Nc)));
    c.Q(0, 0) = jget(m, "q_y", c.Q(0, 0));
    c.Q(1, 1) = jget(m, "q_psi", c.Q(1, 1));
    c.R = jget(m, "r", c.R);
    c.beta = jget(m, "beta", c.beta);
    c.rho_slack = jget(m, "rho_slack", c.rho_slack);
    c.eps_scale = jget(m, "eps_scale", c.eps_scale);
    c.T_s = jget(m, "ts_s", c.T_s);
    c.du_max = jget(m, "du_max_rad", c.du_max);
    c.u_max = jget(m, "u_max_rad", c.u_max);
    const double ydot = jget(m, "ydot_limit_mps", c.x_max(0));
    const double psidot = jget(m, "psidot_limit_rad_s", c.x_max(2));
    c.x_max(0) = ydot;
    c.x_min(0) = -ydot;
    c.x_max(2) = psidot;
    c.x_min(2) = -psidot;
    if (m.contains("cost_mode")) {
      const std::string mode = m["cost_mode"].get<std::string>();
      if (mode == "enhanced")
        c.cost_mode = CostMode::enhanced;
      else if (mode == "standard")
        c.cost_mode = CostMode::standard;
      else
        throw ScenarioError("scenario: cost_mode must be 'standard' or 'enhanced'");
    }
  }

  if (j.contains("pso")) {
    const json& p = j["pso"];
    check_keys(p,
               {"particles", "generations", "omega_max", "omega_min", "lambda1",
                "lambda2", "c1_init", "c2_init", "gain_bounds"},
               "pso");
    PsoConfig& c = sc.pso;
    c.n_particles = static_cast<int>(jget(p, "particles", c.n_particles));
    c.max_generations = static_cast<int>(jget(p, "generations", c.max_generations));
    c.omega_max = jget(p, "omega_max", c.omega_max);
    c.omega_min = jget(p, "omega_min", c.omega_min);
    c.lambda1 = jget(p, "lambda1", c.lambda1);
    c.lambda2 = jget(p, "lambda2", c.lambda2);
    c.c1_init = jget(p, "c1_init", c.c1_init);
    c.c2_init = jget(p, "c2_init", c.c2_init);
    if (p.contains("gain_bounds")) {
      c.bounds.clear();
      for (const auto& bj : p["gain_bounds"])
        c.bounds.push_back({bj.at(0).get<double>(), bj.at(1).get<double>()});
    }
  }

  sc.validate();
  return sc;
}

inline Scenario load_scenario(const std::string& file) {
  std::ifstream f(file);
  if (!f) throw std::runtime_error("load_scenario: cannot open " + file);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario: JSON parse error: ") + e.what());
  }
  return scenario_from_json(j);
}

inline void save_scenario(const Scenario& sc, const std::string& file) {
  std::ofstream f(file);
  if (!f) throw std::runtime_error("save_scenario: cannot open " + file);
  f << scenario_to_json(sc).dump(2) << '\n';
  if (!f) throw std::runtime_error("save_scenario: write failed for " + file);
}

/// Double lane change: 3.5 m out and back with long quintic transitions,
/// speed swelling from 50 to 65 km/h and back, gusty rotating wind.
inline Scenario make_double_lane_change() {
  Scenario sc;
  sc.name = "double_lane_change";
  sc.duration = 16.0;
  sc.seed = 1;
  sc.path = ReferencePath(LaneMovePath(
      {{50.0, 50.0, 3.5}, {130.0, 50.0, -3.5}}, 280.0));
  const double v_lo = 50.0 / 3.6, v_hi = 65.0 / 3.6;
  sc.speed = SpeedProfile({0.0, 2.0, 6.0, 10.0, 14.0},
                          {v_lo, v_lo, v_hi, v_hi, v_lo});
  sc.env.mu = 0.95;
  sc.env.wind = {4.0, 3.0, 11.0, 1.0, 3.7, 0.4, 0.8, 0.35};
  sc.rls_noise.force_std = 50.0;
  // Swarm-tuned on this scenario (reproduce with `vdc tune`). Pure tracking
  // MSE rewards the most aggressive admissible PID, so the optimum sits at
  // the top corner of the default search box.
  sc.pid_gains = {20.0, 2.0, 2.0};
  return sc;
}

/// Longer mixed track: four lane moves of varying severity, speed wandering
/// between 11 and 16 m/s, steady crosswind with slow heading drift.
inline Scenario make_general_track() {
  Scenario sc;
  sc.name = "general_track";
  sc.duration = 30.0;
  sc.seed = 7;
  sc.path = ReferencePath(LaneMovePath({{40.0, 60.0, 3.0},
                                        {130.0, 80.0, -5.0},
                                        {240.0, 50.0, 2.5},
                                        {320.0, 40.0, -0.5}},
                                       430.0));
  sc.speed = SpeedProfile({0.0, 4.0, 9.0, 14.0, 20.0, 26.0, 30.0},
                          {13.0, 15.5, 16.0, 12.0, 11.0, 14.5, 13.0});
  sc.env.mu = 0.95;
  sc.env.wind = {3.0, 2.0, 13.0, 1.0, 5.0, 0.0, 2.0, -0.25};
  sc.rls_noise.force_std = 50.0;
  sc.pid_gains = {20.0, 2.0, 2.0};
  return sc;
}

/// Straight lane, constant 15 m/s, no wind, no noise: the regulation
/// baseline where every tracking error should collapse to ~0.
inline Scenario make_straight() {
  Scenario sc;
  sc.name = "straight";
  sc.duration = 20.0;
  sc.seed = 3;
  sc.path = ReferencePath(LaneMovePath({}, 400.0));
  sc.speed = SpeedProfile({0.0}, {15.0});
  sc.env.mu = 0.95;
  sc.env.wind = {};
  sc.pid_gains = {20.0, 2.0, 2.0};
  return sc;
}

}  // namespace vdc
