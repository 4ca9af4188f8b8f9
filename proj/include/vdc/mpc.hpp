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
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "vdc/lpv.hpp"
#include "vdc/qp.hpp"

namespace vdc {

enum class CostMode { standard, enhanced };

/// Receding-horizon controller configuration. Defaults are the tuned lateral
/// tracking set: horizon 9 at 100 ms, output weights favoring position over
/// heading, front-loaded exponential stage discount for the enhanced cost.
struct MpcConfig {
  int Np = 9;  // prediction horizon [steps]
  int Nc = 9;  // control horizon [steps]
  Eigen::MatrixXd Q = (Eigen::Matrix2d() << 35.0, 0.0, 0.0, 3.25).finished();
  double R = 1.25;         // weight on each steering increment
  double beta = 3.5;       // stage discount base, enhanced mode
  double rho_slack = 15.0; // quadratic weight on the slack variable
  double eps_scale = 0.5;  // slack scale in softened constraint rows
  double T_s = 0.1;        // controller period [s]
  double du_max = std::numbers::pi / 12.0;  // per-step increment bound [rad]
  double u_max = std::numbers::pi / 6.0;    // absolute steering bound [rad]
  // per-state box over the horizon; +-infinity disables a row
  Eigen::VectorXd x_min = (Eigen::Vector4d() << -4.0,
                           -std::numeric_limits<double>::infinity(), -1.0,
                           -std::numeric_limits<double>::infinity())
                              .finished();
  Eigen::VectorXd x_max = (Eigen::Vector4d() << 4.0,
                           std::numeric_limits<double>::infinity(), 1.0,
                           std::numeric_limits<double>::infinity())
                              .finished();
  CostMode cost_mode = CostMode::enhanced;

  void validate() const {
    if (!(Np >= 1 && Nc >= 1 && Nc <= Np))
      throw std::invalid_argument("MpcConfig: need 1 <= Nc <= Np");
    if (!(R > 0.0)) throw std::invalid_argument("MpcConfig: R must be > 0");
    if (!(beta >= 1.0)) throw std::invalid_argument("MpcConfig: beta must be >= 1");
    if (!(rho_slack > 0.0 && eps_scale > 0.0))
      throw std::invalid_argument("MpcConfig: slack weights must be > 0");
    if (!(T_s > 0.0)) throw std::invalid_argument("MpcConfig: T_s must be > 0");
    if (!(du_max > 0.0 && u_max > 0.0))
      throw std::invalid_argument("MpcConfig: input bounds must be > 0");
    if (x_min.size() != x_max.size())
      throw std::invalid_argument("MpcConfig: state bound size mismatch");
  }
};

/// Condensed prediction of the input-incremental model. With the state
/// augmented by the previous input, x_aug = [x; u_prev], the stacked outputs
/// satisfy Y_p = psi * x_aug + theta * dU, and the stacked augmented states
/// satisfy X_p = psi_x * x_aug + theta_x * dU. theta is lower block
/// triangular; increments beyond Nc are zero (input held).
struct Prediction {
  Eigen::MatrixXd psi, theta;      // outputs: (Np*ny) x naug, (Np*ny) x Nc
  Eigen::MatrixXd psi_x, theta_x;  // states: (Np*naug) x naug, (Np*naug) x Nc
  int Np = 0, Nc = 0;
  int nx = 0;  // unaugmented state size
  int ny = 0;
};

inline Prediction build_prediction(const LtiInstance& lti, int Np, int Nc) {
  const int nx = static_cast<int>(lti.A_d.rows());
  const int ny = static_cast<int>(lti.C.rows());
  if (lti.A_d.cols() != nx || lti.B_d.rows() != nx || lti.B_d.cols() != 1 ||
      lti.C.cols() != nx)
    throw std::invalid_argument("build_prediction: inconsistent model dimensions");
  if (!(Np >= 1 && Nc >= 1 && Nc <= Np))
    throw std::invalid_argument("build_prediction: need 1 <= Nc <= Np");

  const int na = nx + 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(na, na);
  A.topLeftCorner(nx, nx) = lti.A_d;
  A.topRightCorner(nx, 1) = lti.B_d;
  A(nx, nx) = 1.0;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(na, 1);
  B.topRows(nx) = lti.B_d;
  B(nx, 0) = 1.0;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(ny, na);
  C.leftCols(nx) = lti.C;

  Prediction p;
  p.Np = Np;
  p.Nc = Nc;
  p.nx = nx;
  p.ny = ny;
  p.psi_x.setZero(Np * na, na);
  p.theta_x.setZero(Np * na, Nc);
  p.psi.setZero(Np * ny, na);
  p.theta.setZero(Np * ny, Nc);

  std::vector<Eigen::MatrixXd> AqB(Np);  // A^q B, the dU_j term in x(k+i+1)
  AqB[0] = B;
  for (int q = 1; q < Np; ++q) AqB[q] = A * AqB[q - 1];

  Eigen::MatrixXd Apow = A;  // A^(i+1) for block row i
  for (int i = 0; i < Np; ++i) {
    p.psi_x.middleRows(i * na, na) = Apow;
    for (int j = 0; j <= std::min(i, Nc - 1); ++j)
      p.theta_x.block(i * na, j, na, 1) = AqB[i - j];
    p.psi.middleRows(i * ny, ny) = C * p.psi_x.middleRows(i * na, na);
    p.theta.middleRows(i * ny, ny) = C * p.theta_x.middleRows(i * na, na);
    Apow = A * Apow;
  }
  return p;
}

namespace detail {

// stage weights: 1 for standard cost, beta^-j (j = 1..) for enhanced
inline Eigen::VectorXd stage_weights(int count, double beta, bool enhanced) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(count);
  if (!enhanced) return w;
  double bj = 1.0;
  for (int j = 0; j < count; ++j) {
    bj /= beta;
    w(j) = bj;
  }
  return w;
}

struct QpBuild {
  QpProblem qp;
  double tracking_const = 0.0;  // constant cost term (Y_r - psi x0)' Qbar (.)
  int n_soft = 0;               // softened rows (enhanced mode)
};

inline QpBuild build_qp(const Prediction& pred, const Eigen::VectorXd& Y_r,
                        const Eigen::VectorXd& x_aug0, double u_prev,
                        const MpcConfig& cfg, double stability_limit,
                        bool enhanced) {
  const int Nc = pred.Nc;
  const int Np = pred.Np;
  const int ny = pred.ny;
  const int na = pred.nx + 1;
  if (Y_r.size() != Np * ny)
    throw std::invalid_argument("build_qp: reference length mismatch");
  if (x_aug0.size() != na)
    throw std::invalid_argument("build_qp: augmented state size mismatch");
  if (cfg.Q.rows() != ny || cfg.Q.cols() != ny)
    throw std::invalid_argument("build_qp: Q must be ny x ny");

  const Eigen::VectorXd wq = stage_weights(Np, cfg.beta, enhanced);
  const Eigen::VectorXd wr = stage_weights(Nc, cfg.beta, enhanced);

  Eigen::MatrixXd Qbar = Eigen::MatrixXd::Zero(Np * ny, Np * ny);
  for (int i = 0; i < Np; ++i)
    Qbar.block(i * ny, i * ny, ny, ny) = wq(i) * cfg.Q;
  Eigen::MatrixXd Rbar = Eigen::MatrixXd::Zero(Nc, Nc);
  for (int i = 0; i < Nc; ++i) Rbar(i, i) = wr(i) * cfg.R;

  const Eigen::VectorXd err = Y_r - pred.psi * x_aug0;
  const int nz = enhanced ? Nc + 1 : Nc;

  QpBuild out;
  out.qp.H = Eigen::MatrixXd::Zero(nz, nz);
  out.qp.H.topLeftCorner(Nc, Nc) =
      2.0 * (pred.theta.transpose() * Qbar * pred.theta + Rbar);
  out.qp.f = Eigen::VectorXd::Zero(nz);
  out.qp.f.head(Nc) = -2.0 * pred.theta.transpose() * Qbar * err;
  out.tracking_const = err.dot(Qbar * err);
  if (enhanced) out.qp.H(Nc, Nc) = 2.0 * cfg.rho_slack;

  // rows: hard rate and amplitude bounds, then (softenable) stability and
  // state-box bounds over the horizon, then slack positivity
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  auto add_row = [&](const Eigen::VectorXd& a_du, double b, bool soft) {
    if (!std::isfinite(b)) return;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(nz);
    r.head(Nc) = a_du;
    if (enhanced && soft) {
      r(Nc) = -cfg.eps_scale;
      ++out.n_soft;
    }
    rows.push_back(std::move(r));
    rhs.push_back(b);
  };

  for (int i = 0; i < Nc; ++i) {  // rate bounds
    Eigen::VectorXd e = Eigen::VectorXd::Zero(Nc);
    e(i) = 1.0;
    add_row(e, cfg.du_max, false);
    add_row(-e, cfg.du_max, false);
  }
  for (int i = 0; i < Nc; ++i) {  // accumulated-input bounds
    Eigen::VectorXd cum = Eigen::VectorXd::Zero(Nc);
    cum.head(i + 1).setOnes();
    add_row(cum, cfg.u_max - u_prev, false);
    add_row(-cum, cfg.u_max + u_prev, false);
    add_row(cum, stability_limit - u_prev, true);
    add_row(-cum, stability_limit + u_prev, true);
  }
  const int nb = static_cast<int>(std::min<Eigen::Index>(cfg.x_min.size(), pred.nx));
  for (int i = 0; i < Np; ++i) {  // state box over the horizon
    for (int k = 0; k < nb; ++k) {
      const int row = i * na + k;
      const double free_resp = pred.psi_x.row(row).dot(x_aug0);
      add_row(pred.theta_x.row(row), cfg.x_max(k) - free_resp, true);
      add_row(-pred.theta_x.row(row), free_resp - cfg.x_min(k), true);
    }
  }
  if (enhanced) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(nz);
    r(Nc) = -1.0;
    rows.push_back(std::move(r));
    rhs.push_back(0.0);
  }

  out.qp.A.resize(static_cast<int>(rows.size()), nz);
  out.qp.b.resize(static_cast<int>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.qp.A.row(static_cast<int>(i)) = rows[i].transpose();
    out.qp.b(static_cast<int>(i)) = rhs[i];
  }
  return out;
}

}  // namespace detail

/// Quadratic tracking cost: H = 2(theta' Qbar theta + Rbar),
/// f = -2 theta' Qbar (Y_r - psi x0), all constraints hard.
inline QpProblem build_qp_standard(const Prediction& pred, const Eigen::VectorXd& Y_r,
                                   const Eigen::VectorXd& x_aug0, double u_prev,
                                   const MpcConfig& cfg, double stability_limit) {
  return detail::build_qp(pred, Y_r, x_aug0, u_prev, cfg, stability_limit, false).qp;
}

/// Enhanced cost: per-stage discount beta^-j on both output error and input
/// increment, plus one scalar slack (quadratic weight rho_slack) that
/// softens the stability and state rows; actuator rate/amplitude stay hard.
inline QpProblem build_qp_enhanced(const Prediction& pred, const Eigen::VectorXd& Y_r,
                                   const Eigen::VectorXd& x_aug0, double u_prev,
                                   const MpcConfig& cfg, double stability_limit) {
  return detail::build_qp(pred, Y_r, x_aug0, u_prev, cfg, stability_limit, true).qp;
}

/// Per-cycle controller report.
struct MpcStepResult {
  double command = 0.0;  // steering angle handed to the plant [rad]
  double du = 0.0;       // applied first increment [rad]
  double cost = 0.0;     // objective value including the constant term
  double slack = 0.0;    // slack magnitude (enhanced mode)
  QpStatus status = QpStatus::optimal;
  bool fallback = false;  // command held because the QP did not solve
  int iterations = 0;
  int active_count = 0;
  double kkt_residual = 0.0;
};

/// Receding-horizon wrapper: builds the prediction from the freshly adapted
/// model each cycle, solves the configured QP, applies the first increment,
/// and keeps the previous active set as the next warm start.
class LpvMpc {
 public:
  explicit LpvMpc(const MpcConfig& cfg = {}) : cfg_(cfg) { cfg_.validate(); }

  /// x0 is the unaugmented model state; stability_limit is the caller's
  /// current envelope bound on |u|. Returns the clamped command.
  MpcStepResult solve_step(const Eigen::VectorXd& x0, double u_prev,
                           const Eigen::VectorXd& Y_r, const LtiInstance& lti,
                           double stability_limit) {
    const Prediction pred = build_prediction(lti, cfg_.Np, cfg_.Nc);
    if (x0.size() != pred.nx)
      throw std::invalid_argument("solve_step: state size mismatch");

    Eigen::VectorXd x_aug(pred.nx + 1);
    x_aug << x0, u_prev;
    const bool enhanced = cfg_.cost_mode == CostMode::enhanced;
    const double lim = std::min(cfg_.u_max, stability_limit);
    const detail::QpBuild built =
        detail::build_qp(pred, Y_r, x_aug, u_prev, cfg_, lim, enhanced);

    const QpSolution sol = vdc::solve(built.qp, warm_ ? &last_ : nullptr);

    MpcStepResult r;
    r.status = sol.status;
    r.iterations = sol.iterations;
    r.active_count = static_cast<int>(sol.active_set.size());
    r.kkt_residual = sol.kkt_residual;

    double du = 0.0;
    if (sol.status == QpStatus::optimal) {
      du = sol.z(0);
      r.cost = built.qp.objective(sol.z) + built.tracking_const;
      if (enhanced) r.slack = sol.z(cfg_.Nc);
      last_ = sol;
      warm_ = true;
    } else {
      r.fallback = true;  // hold the previous command
      warm_ = false;
    }

    // safety clamps; no-ops on a successful solve
    double u = u_prev + du;
    u = std::clamp(u, -lim, lim);
    r.du = std::clamp(u - u_prev, -cfg_.du_max, cfg_.du_max);
    r.command = u_prev + r.du;
    return r;
  }

  void reset() { warm_ = false; }
  const MpcConfig& config() const { return cfg_; }
  MpcConfig& config() { return cfg_; }

 private:
  MpcConfig cfg_;
  QpSolution last_;
  bool warm_ = false;
};

}  // namespace vdc
