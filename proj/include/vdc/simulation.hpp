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

#include <chrono>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vdc/envelope.hpp"
#include "vdc/mpc.hpp"
#include "vdc/pid.hpp"
#include "vdc/plant.hpp"
#include "vdc/rls.hpp"
#include "vdc/scenario.hpp"
#include "vdc/trace_io.hpp"

namespace vdc {

/// Fixed rates of the co-simulation: the plant integrates at 1 kHz, the
/// speed loop runs at 100 Hz, the lateral loop at the controller period
/// (default 10 Hz).
inline constexpr double kPlantDt = 1e-3;
inline constexpr int kPidDivisor = 10;

struct RunOptions {
  bool timing = false;  // record wall-clock QP solve times in the trace
  std::optional<std::uint64_t> seed_override;
  std::optional<CostMode> mode_override;
};

struct RunSummary {
  double speed_mse = 0.0;     // [(m/s)^2]
  double position_mse = 0.0;  // [m^2]
  double heading_mse = 0.0;   // [rad^2]
  double max_abs_y_err = 0.0;     // [m]
  double max_abs_speed_err = 0.0; // [m/s]
  int constraint_violations = 0;
  int mpc_fallbacks = 0;
  int rls_resets = 0;
  bool aborted = false;
  std::string abort_reason;
  double cf_hat_final = 0.0;
  double cr_hat_final = 0.0;
  double solve_ms_mean = 0.0;
  double solve_ms_max = 0.0;
  std::size_t samples = 0;
};

struct RunResult {
  std::string scenario_name;
  CostMode cost_mode = CostMode::enhanced;
  std::uint64_t seed = 0;
  std::vector<TraceRow> trace;
  RunSummary summary;
};

/// Tracking metrics recomputed from trace rows alone; run() uses this too,
/// so an exported CSV always reproduces the summary it shipped with.
inline void accumulate_errors(const std::vector<TraceRow>& trace, RunSummary& s) {
  s.samples = trace.size();
  if (trace.empty()) return;
  double se = 0.0, pe = 0.0, he = 0.0;
  for (const auto& r : trace) {
    const double ev = r.v_ref - r.v;
    const double ey = r.y_ref - r.y;
    const double ep = r.psi_ref - r.psi;
    se += ev * ev;
    pe += ey * ey;
    he += ep * ep;
    s.max_abs_speed_err = std::max(s.max_abs_speed_err, std::abs(ev));
    s.max_abs_y_err = std::max(s.max_abs_y_err, std::abs(ey));
  }
  s.speed_mse = se / trace.size();
  s.position_mse = pe / trace.size();
  s.heading_mse = he / trace.size();
}

/// Runs the full coordinated loop of one scenario. Deterministic for a given
/// scenario + seed unless wall-clock timing is opted in (which only affects
/// the solve_ms column).
inline RunResult run(const Scenario& sc_in, const RunOptions& opt = {}) {
  Scenario sc = sc_in;
  if (opt.seed_override) sc.seed = *opt.seed_override;
  if (opt.mode_override) sc.mpc.cost_mode = *opt.mode_override;
  sc.validate();

  RunResult out;
  out.scenario_name = sc.name;
  out.cost_mode = sc.mpc.cost_mode;
  out.seed = sc.seed;

  const VehicleParams& p = sc.vehicle;
  PlantState st;
  st.v_x = sc.speed(0.0);
  st.omega_w = st.v_x / p.R_w;
  st.y_g = sc.path.y(0.0);
  st.psi = sc.path.heading(0.0);

  SpeedPid pid({sc.pid_gains});
  ThrottleBrakeSwitch sw;
  RlsEstimator rls(sc.rls);
  LpvMpc mpc(sc.mpc);
  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int mpc_divisor =
      std::max(1, static_cast<int>(std::llround(sc.mpc.T_s / kPlantDt)));
  const long n_steps = std::llround(sc.duration / kPlantDt);
  const int Np = sc.mpc.Np;

  PlantInput u;
  double u_prev = 0.0;
  MpcStepResult mpc_diag;
  double solve_ms = 0.0, solve_ms_sum = 0.0;
  long solve_count = 0;
  RunSummary& sum = out.summary;
  out.trace.reserve(static_cast<std::size_t>(n_steps / kPidDivisor) + 1);

  for (long k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * kPlantDt;

    if (k % mpc_divisor == 0) {
      // estimator feed: truth at the current state under the held command,
      // with the configured measurement noise (noise draws happen every
      // cycle so run-to-run comparability does not depend on settings)
      const double nf = gauss(rng) * sc.rls_noise.force_std;
      const double nr = gauss(rng) * sc.rls_noise.force_std;
      const double naf = gauss(rng) * sc.rls_noise.slip_std;
      const double nar = gauss(rng) * sc.rls_noise.slip_std;
      const LateralTruth truth = lateral_truth(st, u.steer, p);
      if (truth.valid) {
        const RlsUpdateInfo info = rls.update(truth.F_f + nf, truth.F_r + nr,
                                              truth.alpha_f + naf,
                                              truth.alpha_r + nar);
        sum.rls_resets += info.reset ? 1 : 0;
      }

      const SchedulingVector rho = SchedulingVector::from_raw(
          st.v_x, rls.c_f_hat(), rls.c_r_hat(), sc.rls.clamp);
      const LtiInstance lti = discretize(build_continuous(rho, p), sc.mpc.T_s);
      if (lti.rho.c_f != rho.c_f || lti.rho.v_x != rho.v_x)
        throw std::logic_error("run: stale model instance in control cycle");

      Eigen::Vector4d x0(st.v_y, LateralState::wrap_angle(st.psi), st.psi_dot,
                         st.y_g);
      Eigen::VectorXd Y_r(2 * Np);
      for (int i = 1; i <= Np; ++i) {
        const double s_i = st.x_g + st.v_x * sc.mpc.T_s * i;
        Y_r(2 * (i - 1)) = sc.path.y(s_i);
        Y_r(2 * (i - 1) + 1) = sc.path.heading(s_i);
      }
      const double lim = steer_limit(st.v_x, p, 1.5, sc.mpc.u_max);

      const auto t0 = std::chrono::steady_clock::now();
      mpc_diag = mpc.solve_step(x0, u_prev, Y_r, lti, lim);
      if (opt.timing) {
        solve_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
      }
      solve_ms_sum += solve_ms;
      sum.solve_ms_max = std::max(sum.solve_ms_max, solve_ms);
      ++solve_count;

      const double tol = 1e-9;
      if (std::abs(mpc_diag.command) > sc.mpc.u_max + tol) ++sum.constraint_violations;
      if (std::abs(mpc_diag.command - u_prev) > sc.mpc.du_max + tol)
        ++sum.constraint_violations;
      if (std::abs(mpc_diag.command) > lim + tol) ++sum.constraint_violations;
      sum.mpc_fallbacks += mpc_diag.fallback ? 1 : 0;

      u.steer = mpc_diag.command;
      u_prev = mpc_diag.command;
    }

    if (k % kPidDivisor == 0) {
      const double v_ref = sc.speed(t);
      const double cmd = pid.control(v_ref, st.v_x, kPidDivisor * kPlantDt);
      auto [throttle, brake] = sw.apply(cmd);
      u.throttle = throttle;
      u.brake = brake;

      if (st.v_x > max_curve_speed(sc.road_at(st.x_g)) + 1e-6)
        ++sum.constraint_violations;

      const WindSample w = sc.env.wind_at(t);
      TraceRow row;
      row.t = t;
      row.v_ref = v_ref;
      row.v = st.v_x;
      row.throttle = throttle;
      row.brake = brake;
      row.delta_f = u.steer;
      row.y_ref = sc.path.y(st.x_g);
      row.y = st.y_g;
      row.psi_ref = sc.path.heading(st.x_g);
      row.psi = st.psi;
      row.cf_hat = rls.c_f_hat();
      row.cr_hat = rls.c_r_hat();
      row.wind_speed = w.speed;
      row.wind_heading = w.heading;
      row.mpc_cost = mpc_diag.cost;
      row.mpc_slack = mpc_diag.slack;
      row.solve_ms = solve_ms;
      out.trace.push_back(row);
    }

    st = step(st, u, p, sc.env, t, kPlantDt);

    if (std::abs(st.y_g) > 100.0 || st.v_x > 60.0) {
      sum.aborted = true;
      sum.abort_reason = std::abs(st.y_g) > 100.0 ? "lateral divergence"
                                                  : "speed divergence";
      break;
    }
  }

  accumulate_errors(out.trace, sum);
  sum.cf_hat_final = rls.c_f_hat();
  sum.cr_hat_final = rls.c_r_hat();
  if (solve_count > 0) sum.solve_ms_mean = solve_ms_sum / solve_count;
  return out;
}

/// Longitudinal-only closed loop (steer pinned to zero, lateral controller
/// off) returning the speed-tracking MSE; the gain-tuning fitness. Unstable
/// loops (speed beyond 3x the reference maximum) score +infinity.
inline double run_longitudinal_mse(const Scenario& sc, const PidGains& gains) {
  const VehicleParams& p = sc.vehicle;
  PlantState st;
  st.v_x = sc.speed(0.0);
  st.omega_w = st.v_x / p.R_w;

  SpeedPid pid({gains});
  ThrottleBrakeSwitch sw;
  const double v_blowup = 3.0 * std::max(sc.speed.max_value(), 1.0);
  const long n_steps = std::llround(sc.duration / kPlantDt);

  PlantInput u;
  double se = 0.0;
  long samples = 0;
  for (long k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * kPlantDt;
    if (k % kPidDivisor == 0) {
      const double v_ref = sc.speed(t);
      const double cmd = pid.control(v_ref, st.v_x, kPidDivisor * kPlantDt);
      auto [throttle, brake] = sw.apply(cmd);
      u.throttle = throttle;
      u.brake = brake;
      const double e = v_ref - st.v_x;
      se += e * e;
      ++samples;
    }
    st = step(st, u, p, sc.env, t, kPlantDt);
    if (st.v_x > v_blowup)
      return std::numeric_limits<double>::infinity();
  }
  return samples > 0 ? se / samples : 0.0;
}

inline const char* cost_mode_name(CostMode m) {
  return m == CostMode::enhanced ? "enhanced" : "standard";
}

inline std::string summary_kv(const RunResult& r) {
  std::ostringstream os;
  os << "scenario=" << r.scenario_name << '\n'
     << "cost_mode=" << cost_mode_name(r.cost_mode) << '\n'
     << "seed=" << r.seed << '\n'
     << "samples=" << r.summary.samples << '\n'
     << "speed_mse=" << format_double(r.summary.speed_mse) << '\n'
     << "position_mse=" << format_double(r.summary.position_mse) << '\n'
     << "heading_mse=" << format_double(r.summary.heading_mse) << '\n'
     << "max_abs_y_err_m=" << format_double(r.summary.max_abs_y_err) << '\n'
     << "max_abs_speed_err_mps=" << format_double(r.summary.max_abs_speed_err) << '\n'
     << "constraint_violations=" << r.summary.constraint_violations << '\n'
     << "mpc_fallbacks=" << r.summary.mpc_fallbacks << '\n'
     << "rls_resets=" << r.summary.rls_resets << '\n'
     << "aborted=" << (r.summary.aborted ? 1 : 0) << '\n'
     << "abort_reason=" << r.summary.abort_reason << '\n'
     << "cf_hat_final=" << format_double(r.summary.cf_hat_final) << '\n'
     << "cr_hat_final=" << format_double(r.summary.cr_hat_final) << '\n'
     << "solve_ms_mean=" << format_double(r.summary.solve_ms_mean) << '\n'
     << "solve_ms_max=" << format_double(r.summary.solve_ms_max) << '\n';
  return os.str();
}

inline std::string summary_table(const RunResult& r) {
  std::ostringstream os;
  os << "run: " << r.scenario_name << " [" << cost_mode_name(r.cost_mode)
     << ", seed " << r.seed << "]\n";
  auto line = [&](const char* k, const std::string& v) {
    os << "  " << k;
    for (std::size_t i = std::string(k).size(); i < 26; ++i) os << ' ';
    os << v << '\n';
  };
  line("samples", std::to_string(r.summary.samples));
  line("speed MSE [(m/s)^2]", format_double(r.summary.speed_mse));
  line("position MSE [m^2]", format_double(r.summary.position_mse));
  line("heading MSE [rad^2]", format_double(r.summary.heading_mse));
  line("max |y err| [m]", format_double(r.summary.max_abs_y_err));
  line("constraint violations", std::to_string(r.summary.constraint_violations));
  line("MPC fallbacks", std::to_string(r.summary.mpc_fallbacks));
  line("RLS resets", std::to_string(r.summary.rls_resets));
  line("aborted", r.summary.aborted ? "yes (" + r.summary.abort_reason + ")" : "no");
  line("c_f estimate [N/rad]", format_double(r.summary.cf_hat_final));
  line("c_r estimate [N/rad]", format_double(r.summary.cr_hat_final));
  line("solve time mean [ms]", format_double(r.summary.solve_ms_mean));
  line("solve time max [ms]", format_double(r.summary.solve_ms_max));
  return os.str();
}

/// Same scenario under both cost modes with identical seed and tuning.
struct CompareReport {
  RunResult standard;
  RunResult enhanced;
};

inline CompareReport compare(const Scenario& sc, const RunOptions& opt = {}) {
  RunOptions o = opt;
  CompareReport rep;
  o.mode_override = CostMode::standard;
  rep.standard = run(sc, o);
  o.mode_override = CostMode::enhanced;
  rep.enhanced = run(sc, o);
  return rep;
}

inline std::string comparison_table(const CompareReport& rep) {
  std::ostringstream os;
  os << "compare: " << rep.standard.scenario_name << " [seed "
     << rep.standard.seed << "]\n";
  auto row = [&](const char* k, double a, double b) {
    os << "  " << k;
    for (std::size_t i = std::string(k).size(); i < 24; ++i) os << ' ';
    std::string sa = format_double(a);
    os << sa;
    for (std::size_t i = sa.size(); i < 26; ++i) os << ' ';
    os << format_double(b) << '\n';
  };
  os << "  metric                  standard                  enhanced\n";
  row("speed MSE", rep.standard.summary.speed_mse, rep.enhanced.summary.speed_mse);
  row("position MSE", rep.standard.summary.position_mse,
      rep.enhanced.summary.position_mse);
  row("heading MSE", rep.standard.summary.heading_mse,
      rep.enhanced.summary.heading_mse);
  row("max |y err|", rep.standard.summary.max_abs_y_err,
      rep.enhanced.summary.max_abs_y_err);
  row("violations", rep.standard.summary.constraint_violations,
      rep.enhanced.summary.constraint_violations);
  row("fallbacks", rep.standard.summary.mpc_fallbacks,
      rep.enhanced.summary.mpc_fallbacks);
  os << "  enhanced max |y err| <= 0.05 m: "
     << (rep.enhanced.summary.max_abs_y_err <= 0.05 ? "pass" : "fail") << '\n';
  return os.str();
}

inline std::string comparison_kv(const CompareReport& rep) {
  std::ostringstream os;
  os << "scenario=" << rep.standard.scenario_name << '\n'
     << "seed=" << rep.standard.seed << '\n'
     << "standard_speed_mse=" << format_double(rep.standard.summary.speed_mse) << '\n'
     << "standard_position_mse=" << format_double(rep.standard.summary.position_mse)
     << '\n'
     << "standard_heading_mse=" << format_double(rep.standard.summary.heading_mse)
     << '\n'
     << "standard_max_abs_y_err_m="
     << format_double(rep.standard.summary.max_abs_y_err) << '\n'
     << "enhanced_speed_mse=" << format_double(rep.enhanced.summary.speed_mse) << '\n'
     << "enhanced_position_mse=" << format_double(rep.enhanced.summary.position_mse)
     << '\n'
     << "enhanced_heading_mse=" << format_double(rep.enhanced.summary.heading_mse)
     << '\n'
     << "enhanced_max_abs_y_err_m="
     << format_double(rep.enhanced.summary.max_abs_y_err) << '\n'
     << "enhanced_within_5cm="
     << (rep.enhanced.summary.max_abs_y_err <= 0.05 ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace vdc
