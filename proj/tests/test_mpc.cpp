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

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "vdc/mpc.hpp"

namespace {

using Catch::Approx;
using namespace vdc;

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1-state, 1-output integrator-style model used by the closed-form checks.
LtiInstance scalar_model(double a, double b) {
  LtiInstance lti;
  lti.A_d = Eigen::MatrixXd::Constant(1, 1, a);
  lti.B_d = Eigen::MatrixXd::Constant(1, 1, b);
  lti.C = Eigen::MatrixXd::Constant(1, 1, 1.0);
  lti.T_s = 0.1;
  return lti;
}

// Unconstrained scalar configuration: all actuator and state boxes disabled.
MpcConfig scalar_config(int Np, int Nc, CostMode mode) {
  MpcConfig cfg;
  cfg.Np = Np;
  cfg.Nc = Nc;
  cfg.Q = Eigen::MatrixXd::Ones(1, 1);
  cfg.R = 1.0;
  cfg.du_max = kInf;
  cfg.u_max = kInf;
  cfg.x_min = Eigen::VectorXd::Constant(1, -kInf);
  cfg.x_max = Eigen::VectorXd::Constant(1, kInf);
  cfg.cost_mode = mode;
  return cfg;
}

LtiInstance random_stable_model(std::mt19937_64& rng, int nx, int ny) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LtiInstance lti;
  lti.A_d.resize(nx, nx);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nx; ++j) lti.A_d(i, j) = u(rng);
  // scale to spectral radius ~0.9 so long products stay well conditioned
  const double radius = lti.A_d.eigenvalues().cwiseAbs().maxCoeff();
  if (radius > 1e-12) lti.A_d *= 0.9 / radius;
  lti.B_d.resize(nx, 1);
  for (int i = 0; i < nx; ++i) lti.B_d(i, 0) = u(rng);
  lti.C.resize(ny, nx);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nx; ++j) lti.C(i, j) = u(rng);
  lti.T_s = 0.1;
  return lti;
}

}  // namespace

TEST_CASE("prediction construction validates its inputs", "[mpc]") {
  LtiInstance lti = scalar_model(1.0, 1.0);
  REQUIRE_THROWS_AS(build_prediction(lti, 0, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(build_prediction(lti, 2, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(build_prediction(lti, 2, 0), std::invalid_argument);

  lti.C.resize(1, 2);  // inconsistent with the 1-state A
  REQUIRE_THROWS_AS(build_prediction(lti, 2, 2), std::invalid_argument);
}

TEST_CASE("single-step prediction matches the augmented map by hand", "[mpc]") {
  std::mt19937_64 rng(3);
  const LtiInstance lti = random_stable_model(rng, 3, 2);
  const Prediction p = build_prediction(lti, 1, 1);

  Eigen::MatrixXd A_aug = Eigen::MatrixXd::Zero(4, 4);
  A_aug.topLeftCorner(3, 3) = lti.A_d;
  A_aug.topRightCorner(3, 1) = lti.B_d;
  A_aug(3, 3) = 1.0;
  Eigen::MatrixXd B_aug(4, 1);
  B_aug << lti.B_d, 1.0;
  Eigen::MatrixXd C_aug = Eigen::MatrixXd::Zero(2, 4);
  C_aug.leftCols(3) = lti.C;

  REQUIRE((p.psi - C_aug * A_aug).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE((p.theta - C_aug * B_aug).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE((p.psi_x - A_aug).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE((p.theta_x - B_aug).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("condensed prediction equals step-by-step simulation", "[mpc]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  for (int trial = 0; trial < 100; ++trial) {
    const int nx = 2 + static_cast<int>(3.0 * (0.5 + 0.5 * u(rng)));
    const int ny = 1 + (trial % 2);
    const int Np = 3 + trial % 8;
    const int Nc = 1 + trial % Np;
    const LtiInstance lti = random_stable_model(rng, nx, ny);
    const Prediction p = build_prediction(lti, Np, Nc);

    Eigen::VectorXd x_aug(nx + 1);
    for (int i = 0; i <= nx; ++i) x_aug(i) = u(rng);
    Eigen::VectorXd dU(Nc);
    for (int i = 0; i < Nc; ++i) dU(i) = u(rng);

    const Eigen::VectorXd Y = p.psi * x_aug + p.theta * dU;
    const Eigen::VectorXd X = p.psi_x * x_aug + p.theta_x * dU;

    // simulate the augmented recursion literally: x+ = A x + B du,
    // du = 0 beyond the control horizon (input hold)
    Eigen::MatrixXd A_aug = Eigen::MatrixXd::Zero(nx + 1, nx + 1);
    A_aug.topLeftCorner(nx, nx) = lti.A_d;
    A_aug.topRightCorner(nx, 1) = lti.B_d;
    A_aug(nx, nx) = 1.0;
    Eigen::VectorXd B_aug(nx + 1);
    B_aug << lti.B_d.col(0), 1.0;

    Eigen::VectorXd x = x_aug;
    for (int k = 0; k < Np; ++k) {
      const double du = k < Nc ? dU(k) : 0.0;
      x = A_aug * x + B_aug * du;
      const Eigen::VectorXd y = lti.C * x.head(nx);
      REQUIRE((X.segment(k * (nx + 1), nx + 1) - x).cwiseAbs().maxCoeff() < 1e-12);
      REQUIRE((Y.segment(k * ny, ny) - y).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("input hold beyond the control horizon is encoded in theta", "[mpc]") {
  std::mt19937_64 rng(29);
  const LtiInstance lti = random_stable_model(rng, 4, 2);
  const Prediction p = build_prediction(lti, 8, 3);

  REQUIRE(p.theta.rows() == 16);
  REQUIRE(p.theta.cols() == 3);
  // strict lower-block-triangular structure: output block i only sees
  // increments with j <= i
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 3; ++j)
      if (j > i)
        REQUIRE(p.theta.block(i * 2, j, 2, 1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scalar toy problem recovers the closed-form increment", "[mpc]") {
  // A=1, B=1, C=1, Np=Nc=1, Q=R=1, x0=0, u_prev=0, y_r=1:
  // J = (1 - du)^2 + du^2, minimized at du = 0.5
  const LtiInstance lti = scalar_model(1.0, 1.0);
  const MpcConfig cfg = scalar_config(1, 1, CostMode::standard);
  const Prediction pred = build_prediction(lti, 1, 1);

  const Eigen::Vector2d x_aug(0.0, 0.0);
  const Eigen::VectorXd y_r = Eigen::VectorXd::Ones(1);
  const QpProblem qp = build_qp_standard(pred, y_r, x_aug, 0.0, cfg, kInf);

  REQUIRE(qp.H.rows() == 1);
  REQUIRE(qp.H(0, 0) == Approx(4.0));
  REQUIRE(qp.f(0) == Approx(-2.0));

  const auto sol = solve(qp);
  REQUIRE(sol.status == QpStatus::optimal);
  REQUIRE(sol.z(0) == Approx(0.5).margin(1e-9));

  // the full controller returns the same command and the true cost 0.5
  LpvMpc mpc(cfg);
  const auto r = mpc.solve_step(Eigen::VectorXd::Zero(1), 0.0, y_r, lti, kInf);
  REQUIRE(r.command == Approx(0.5).margin(1e-9));
  REQUIRE(r.cost == Approx(0.5).margin(1e-9));
  REQUIRE_FALSE(r.fallback);
}

TEST_CASE("perfect tracking demands zero increment", "[mpc]") {
  std::mt19937_64 rng(41);
  const LtiInstance lti = random_stable_model(rng, 4, 2);
  MpcConfig cfg;
  cfg.Np = 6;
  cfg.Nc = 4;
  cfg.x_min = Eigen::VectorXd::Constant(4, -kInf);
  cfg.x_max = Eigen::VectorXd::Constant(4, kInf);

  Eigen::VectorXd x0(4);
  x0 << 0.2, -0.1, 0.3, 0.05;
  Eigen::VectorXd x_aug(5);
  x_aug << x0, 0.02;

  const Prediction pred = build_prediction(lti, cfg.Np, cfg.Nc);
  const Eigen::VectorXd y_r = pred.psi * x_aug;  // reference = free response

  for (CostMode mode : {CostMode::standard, CostMode::enhanced}) {
    cfg.cost_mode = mode;
    LpvMpc mpc(cfg);
    const auto r = mpc.solve_step(x0, 0.02, y_r, lti, kInf);
    REQUIRE(r.du == Approx(0.0).margin(1e-9));
    REQUIRE(r.command == Approx(0.02).margin(1e-9));
    REQUIRE(r.slack == Approx(0.0).margin(1e-9));
  }
}

TEST_CASE("stage discounts scale the quadratic cost blocks", "[mpc]") {
  // with B = 0 the tracking block vanishes and H exposes Rbar directly
  const LtiInstance lti = scalar_model(0.5, 0.0);
  const Prediction pred = build_prediction(lti, 2, 2);
  MpcConfig cfg = scalar_config(2, 2, CostMode::enhanced);
  cfg.R = 1.25;

  const Eigen::Vector2d x_aug(1.0, 0.0);
  const Eigen::VectorXd y_r = Eigen::VectorXd::Zero(2);

  const QpProblem std_qp = build_qp_standard(pred, y_r, x_aug, 0.0, cfg, kInf);
  REQUIRE(std_qp.H(0, 0) == Approx(2.0 * 1.25));
  REQUIRE(std_qp.H(1, 1) == Approx(2.0 * 1.25));

  const QpProblem enh_qp = build_qp_enhanced(pred, y_r, x_aug, 0.0, cfg, kInf);
  REQUIRE(enh_qp.H.rows() == 3);  // + slack column
  REQUIRE(enh_qp.H(0, 0) == Approx(2.0 * 1.25 / 3.5).epsilon(1e-12));
  REQUIRE(enh_qp.H(1, 1) == Approx(2.0 * 1.25 / (3.5 * 3.5)).epsilon(1e-12));
  REQUIRE(enh_qp.H(2, 2) == Approx(2.0 * 15.0));

  // first two discount factors for beta = 3.5
  REQUIRE(1.0 / 3.5 == Approx(0.2857142857).margin(1e-10));
  REQUIRE(1.0 / (3.5 * 3.5) == Approx(0.0816326531).margin(1e-10));
}

TEST_CASE("enhanced cost with unit base reduces to the standard cost", "[mpc]") {
  std::mt19937_64 rng(43);
  const LtiInstance lti = random_stable_model(rng, 4, 2);
  MpcConfig cfg;
  cfg.Np = 5;
  cfg.Nc = 3;
  cfg.beta = 1.0;
  cfg.x_min = Eigen::VectorXd::Constant(4, -kInf);
  cfg.x_max = Eigen::VectorXd::Constant(4, kInf);

  Eigen::VectorXd x0(4);
  x0 << 0.1, 0.0, -0.2, 0.4;
  Eigen::VectorXd y_r = Eigen::VectorXd::Constant(10, 0.3);

  cfg.cost_mode = CostMode::standard;
  LpvMpc std_mpc(cfg);
  const auto rs = std_mpc.solve_step(x0, 0.0, y_r, lti, kInf);

  cfg.cost_mode = CostMode::enhanced;
  LpvMpc enh_mpc(cfg);
  const auto re = enh_mpc.solve_step(x0, 0.0, y_r, lti, kInf);

  // identical weights, no binding soft rows: the slack sits at zero and the
  // two programs share their minimizer
  REQUIRE(re.slack == Approx(0.0).margin(1e-9));
  REQUIRE(re.du == Approx(rs.du).margin(1e-9));
  REQUIRE(re.cost == Approx(rs.cost).margin(1e-7));
}

TEST_CASE("heavy slack weight recovers the hard solution", "[mpc]") {
  // one-step scalar system pushed against its state box: the soft program
  // with a punitive slack weight must approach the hard optimum
  const LtiInstance lti = scalar_model(0.9, 0.5);
  MpcConfig cfg = scalar_config(1, 1, CostMode::standard);
  cfg.beta = 1.0;
  cfg.x_max = Eigen::VectorXd::Constant(1, 1.5);

  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 2.0);
  const Eigen::VectorXd y_r = Eigen::VectorXd::Constant(1, 5.0);  // pull upward

  LpvMpc hard(cfg);
  const auto rh = hard.solve_step(x0, 0.0, y_r, lti, kInf);
  REQUIRE_FALSE(rh.fallback);
  // the box pins the state: 0.9*2 + 0.5*du = 1.5
  REQUIRE(rh.du == Approx(-0.6).margin(1e-9));

  cfg.cost_mode = CostMode::enhanced;
  cfg.rho_slack = 1e8;
  LpvMpc soft(cfg);
  const auto re = soft.solve_step(x0, 0.0, y_r, lti, kInf);
  REQUIRE_FALSE(re.fallback);
  REQUIRE(re.du == Approx(rh.du).margin(1e-4));
}

TEST_CASE("slack absorbs an infeasible state constraint", "[mpc]") {
  // B = 0: no input moves the state, so the box below the free response is
  // unreachable for the hard program
  const LtiInstance lti = scalar_model(1.0, 0.0);
  MpcConfig cfg = scalar_config(1, 1, CostMode::standard);
  cfg.x_max = Eigen::VectorXd::Constant(1, 0.5);

  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 1.0);
  const Eigen::VectorXd y_r = Eigen::VectorXd::Zero(1);

  LpvMpc hard(cfg);
  const auto rh = hard.solve_step(x0, 0.1, y_r, lti, kInf);
  REQUIRE(rh.fallback);
  REQUIRE(rh.status == QpStatus::infeasible);
  REQUIRE(rh.command == Approx(0.1));  // previous command held

  cfg.cost_mode = CostMode::enhanced;
  LpvMpc soft(cfg);
  const auto re = soft.solve_step(x0, 0.1, y_r, lti, kInf);
  REQUIRE_FALSE(re.fallback);
  // violation 0.5 relaxed through eps_scale 0.5: slack settles at exactly 1
  REQUIRE(re.slack == Approx(1.0).margin(1e-6));
}

TEST_CASE("commands respect rate, amplitude and envelope bounds", "[mpc]") {
  VehicleParams p;
  const auto rho = SchedulingVector::from_raw(15.0, p.c_f_true(), p.c_r_true());
  const LtiInstance lti = discretize(build_continuous(rho, p), 0.1);

  for (CostMode mode : {CostMode::standard, CostMode::enhanced}) {
    MpcConfig cfg;
    cfg.cost_mode = mode;
    LpvMpc mpc(cfg);

    Eigen::VectorXd x0(4);
    x0 << 0.0, 0.0, 0.0, 8.0;  // huge lateral offset demands hard steering
    const Eigen::VectorXd y_r = Eigen::VectorXd::Zero(18);

    double u_prev = 0.0;
    const double lim = 0.05;  // envelope tighter than u_max
    for (int k = 0; k < 5; ++k) {
      const auto r = mpc.solve_step(x0, u_prev, y_r, lti, lim);
      REQUIRE(std::abs(r.command - u_prev) <= cfg.du_max + 1e-12);
      REQUIRE(std::abs(r.command) <= lim + 1e-12);
      u_prev = r.command;
    }
  }
}

TEST_CASE("steering pushes the vehicle back toward the reference", "[mpc]") {
  VehicleParams p;
  const auto rho = SchedulingVector::from_raw(15.0, p.c_f_true(), p.c_r_true());
  const LtiInstance lti = discretize(build_continuous(rho, p), 0.1);

  MpcConfig cfg;
  LpvMpc mpc(cfg);

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(4);
  x0(3) = 1.0;  // sitting 1 m left of the reference
  const Eigen::VectorXd y_r = Eigen::VectorXd::Zero(18);

  const auto r = mpc.solve_step(x0, 0.0, y_r, lti, std::numbers::pi / 6.0);
  REQUIRE_FALSE(r.fallback);
  REQUIRE(r.command < 0.0);  // steer right

  x0(3) = -1.0;
  mpc.reset();
  const auto r2 = mpc.solve_step(x0, 0.0, y_r, lti, std::numbers::pi / 6.0);
  REQUIRE(r2.command > 0.0);
}

TEST_CASE("warm started resolve reproduces the cold answer", "[mpc]") {
  VehicleParams p;
  const auto rho = SchedulingVector::from_raw(18.0, 1.1e5, 1.4e5);
  const LtiInstance lti = discretize(build_continuous(rho, p), 0.1);

  MpcConfig cfg;
  LpvMpc mpc(cfg);

  Eigen::VectorXd x0(4);
  x0 << 0.3, 0.02, -0.05, 0.6;
  Eigen::VectorXd y_r(18);
  for (int i = 0; i < 9; ++i) {
    y_r(2 * i) = 0.5;
    y_r(2 * i + 1) = 0.01;
  }

  const auto cold = mpc.solve_step(x0, 0.01, y_r, lti, 0.3);
  const auto warm = mpc.solve_step(x0, 0.01, y_r, lti, 0.3);  // warm path
  REQUIRE(warm.command == Approx(cold.command).margin(1e-9));
  REQUIRE(warm.cost == Approx(cold.cost).margin(1e-7));
}

TEST_CASE("solver diagnostics surface in the step result", "[mpc]") {
  VehicleParams p;
  const auto rho = SchedulingVector::from_raw(15.0, p.c_f_true(), p.c_r_true());
  const LtiInstance lti = discretize(build_continuous(rho, p), 0.1);

  MpcConfig cfg;
  LpvMpc mpc(cfg);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(4);
  x0(3) = 2.0;
  const Eigen::VectorXd y_r = Eigen::VectorXd::Zero(18);

  const auto r = mpc.solve_step(x0, 0.0, y_r, lti, 0.1);
  REQUIRE(r.kkt_residual < 1e-8);
  REQUIRE(r.iterations > 0);
  REQUIRE(r.active_count >= 0);
  REQUIRE(r.cost >= 0.0);
}

TEST_CASE("configuration validation rejects inconsistent setups", "[mpc]") {
  MpcConfig cfg;
  cfg.Nc = cfg.Np + 1;
  REQUIRE_THROWS_AS(LpvMpc(cfg), std::invalid_argument);

  cfg = MpcConfig{};
  cfg.R = 0.0;
  REQUIRE_THROWS_AS(LpvMpc(cfg), std::invalid_argument);

  cfg = MpcConfig{};
  cfg.beta = 0.5;
  REQUIRE_THROWS_AS(LpvMpc(cfg), std::invalid_argument);

  cfg = MpcConfig{};
  cfg.T_s = 0.0;
  REQUIRE_THROWS_AS(LpvMpc(cfg), std::invalid_argument);

  cfg = MpcConfig{};
  cfg.x_min = Eigen::VectorXd::Constant(3, -1.0);  // size clash with x_max
  REQUIRE_THROWS_AS(LpvMpc(cfg), std::invalid_argument);

  cfg = MpcConfig{};
  REQUIRE_NOTHROW(LpvMpc(cfg));
}

TEST_CASE("mismatched call dimensions throw", "[mpc]") {
  const LtiInstance lti = scalar_model(1.0, 1.0);
  const MpcConfig cfg = scalar_config(2, 2, CostMode::standard);
  LpvMpc mpc(cfg);

  // wrong state size
  REQUIRE_THROWS_AS(
      mpc.solve_step(Eigen::VectorXd::Zero(3), 0.0, Eigen::VectorXd::Zero(2), lti, 1.0),
      std::invalid_argument);
  // wrong reference length
  REQUIRE_THROWS_AS(
      mpc.solve_step(Eigen::VectorXd::Zero(1), 0.0, Eigen::VectorXd::Zero(5), lti, 1.0),
      std::invalid_argument);

  // wrong Q size for the model's output count
  MpcConfig bad = scalar_config(2, 2, CostMode::standard);
  bad.Q = Eigen::MatrixXd::Identity(2, 2);
  LpvMpc mpc2(bad);
  REQUIRE_THROWS_AS(
      mpc2.solve_step(Eigen::VectorXd::Zero(1), 0.0, Eigen::VectorXd::Zero(2), lti, 1.0),
      std::invalid_argument);
}
