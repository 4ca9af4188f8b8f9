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

#include <cmath>
#include <random>
#include <vector>

#include "vdc/rls.hpp"

namespace {

using Catch::Approx;
using namespace vdc;

// Unregularized batch least squares for one scalar channel, the oracle the
// recursion must reproduce when nothing is forgotten.
double batch_ls(const std::vector<double>& phi, const std::vector<double>& z) {
  double num = 0.0, den = 0.0;
  for (size_t k = 0; k < phi.size(); ++k) {
    num += phi[k] * z[k];
    den += phi[k] * phi[k];
  }
  return num / den;
}

}  // namespace

TEST_CASE("estimator converges on noise-free data", "[rls]") {
  RlsConfig cfg;
  cfg.lambda = 1.0;
  RlsEstimator est(cfg);

  const double c_f = 8.0e4, c_r = 7.5e4;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mag(2e-3, 0.1);
  std::bernoulli_distribution flip(0.5);

  for (int k = 0; k < 50; ++k) {
    const double af = (flip(rng) ? 1.0 : -1.0) * mag(rng);
    const double ar = (flip(rng) ? 1.0 : -1.0) * mag(rng);
    est.update(c_f * af, c_r * ar, af, ar);
  }

  REQUIRE(est.c_f_hat() == Approx(c_f).epsilon(1e-3));
  REQUIRE(est.c_r_hat() == Approx(c_r).epsilon(1e-3));
  REQUIRE(est.n_updates() == 50);
}

TEST_CASE("recursion reproduces batch least squares exactly", "[rls]") {
  // With lambda = 1 and a diffuse prior the recursion and the closed-form
  // batch solution are the same estimator.
  RlsConfig cfg;
  cfg.lambda = 1.0;
  cfg.p0 = 1e16;
  RlsEstimator est(cfg);

  const double c_f = 1.31e5, c_r = 1.62e5;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> mag(5e-3, 0.08);
  std::bernoulli_distribution flip(0.5);

  std::vector<double> af_all, ar_all, ff_all, fr_all;
  for (int k = 0; k < 40; ++k) {
    const double af = (flip(rng) ? 1.0 : -1.0) * mag(rng);
    const double ar = (flip(rng) ? 1.0 : -1.0) * mag(rng);
    af_all.push_back(af);
    ar_all.push_back(ar);
    ff_all.push_back(c_f * af);
    fr_all.push_back(c_r * ar);
    est.update(ff_all.back(), fr_all.back(), af, ar);

    if (k >= 1) {
      REQUIRE(est.c_f_hat() == Approx(batch_ls(af_all, ff_all)).epsilon(1e-9));
      REQUIRE(est.c_r_hat() == Approx(batch_ls(ar_all, fr_all)).epsilon(1e-9));
    }
  }
}

TEST_CASE("noisy estimates agree with batch least squares", "[rls]") {
  RlsConfig cfg;
  cfg.lambda = 1.0;
  cfg.p0 = 1e12;
  RlsEstimator est(cfg);

  const double c_f = 1.25e5, c_r = 1.67e5;
  std::mt19937_64 rng(23);
  std::normal_distribution<double> noise(0.0, 50.0);
  std::uniform_real_distribution<double> mag(5e-3, 0.08);
  std::bernoulli_distribution flip(0.5);

  std::vector<double> af_all, ar_all, ff_all, fr_all;
  for (int k = 0; k < 300; ++k) {
    const double af = (flip(rng) ? 1.0 : -1.0) * mag(rng);
    const double ar = (flip(rng) ? 1.0 : -1.0) * mag(rng);
    af_all.push_back(af);
    ar_all.push_back(ar);
    ff_all.push_back(c_f * af + noise(rng));
    fr_all.push_back(c_r * ar + noise(rng));
    est.update(ff_all.back(), fr_all.back(), af_all.back(), ar_all.back());
  }

  REQUIRE(est.c_f_hat() == Approx(batch_ls(af_all, ff_all)).epsilon(1e-6));
  REQUIRE(est.c_r_hat() == Approx(batch_ls(ar_all, fr_all)).epsilon(1e-6));

  // and both land near the truth: the noise floor here is a few hundred N/rad
  REQUIRE(est.c_f_hat() == Approx(c_f).epsilon(0.02));
  REQUIRE(est.c_r_hat() == Approx(c_r).epsilon(0.02));
}

TEST_CASE("slip dead-band freezes the starved channel", "[rls]") {
  RlsEstimator est;
  const Eigen::Vector2d before = est.theta();

  auto info = est.update(1000.0, 900.0, 0.0, 0.0);
  REQUIRE_FALSE(info.updated_front);
  REQUIRE_FALSE(info.updated_rear);
  REQUIRE(est.theta() == before);
  REQUIRE(est.n_updates() == 0);

  // straight-line noise on forces must not corrupt the estimates either
  for (int k = 0; k < 100; ++k) est.update(50.0, -30.0, 5e-4, -8e-4);
  REQUIRE(est.theta() == before);

  // one excited channel updates alone
  info = est.update(8e4 * 0.05, 0.0, 0.05, 0.0);
  REQUIRE(info.updated_front);
  REQUIRE_FALSE(info.updated_rear);
  REQUIRE(est.n_updates() == 1);
}

TEST_CASE("innovation is the pre-update prediction error", "[rls]") {
  RlsEstimator est;  // theta0 = 8e4 on both channels
  const auto info = est.update(5000.0, -2000.0, 0.05, -0.02);
  REQUIRE(info.innovation(0) == Approx(5000.0 - 8e4 * 0.05).margin(1e-9));
  REQUIRE(info.innovation(1) == Approx(-2000.0 - 8e4 * -0.02).margin(1e-9));
}

TEST_CASE("estimates stay inside the physical clamp", "[rls]") {
  RlsConfig cfg;
  cfg.lambda = 1.0;
  RlsEstimator est(cfg);

  // data pointing far above the admissible range
  for (int k = 0; k < 100; ++k) est.update(5e5 * 0.05, 5e5 * 0.05, 0.05, 0.05);
  REQUIRE(est.c_f_hat() <= cfg.clamp.hi);
  REQUIRE(est.c_r_hat() <= cfg.clamp.hi);
  REQUIRE(est.c_f_hat() == Approx(cfg.clamp.hi));

  est.reset();
  for (int k = 0; k < 100; ++k) est.update(5e3 * 0.05, 5e3 * 0.05, 0.05, 0.05);
  REQUIRE(est.c_f_hat() >= cfg.clamp.lo);
  REQUIRE(est.c_r_hat() >= cfg.clamp.lo);
}

TEST_CASE("covariance stays positive definite", "[rls]") {
  RlsConfig cfg;
  cfg.lambda = 0.995;
  RlsEstimator est(cfg);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> mag(1e-3, 0.1);
  for (int k = 0; k < 2000; ++k) {
    const double af = mag(rng) * (k % 2 == 0 ? 1.0 : -1.0);
    const double ar = mag(rng) * (k % 3 == 0 ? 1.0 : -1.0);
    est.update(1.2e5 * af, 1.5e5 * ar, af, ar);

    const Eigen::LLT<Eigen::Matrix2d> llt(est.covariance());
    REQUIRE(llt.info() == Eigen::Success);
  }
}

TEST_CASE("covariance blow-up triggers a flagged reset", "[rls]") {
  RlsConfig cfg;
  cfg.lambda = 0.5;         // heavy forgetting
  cfg.slip_deadband = 1e-6; // admit nearly unexciting slip
  cfg.p_blowup = 1e7;       // low ceiling so the guard fires quickly
  RlsEstimator est(cfg);

  // with phi^2 P << 1 - lambda each update multiplies P by ~1/lambda,
  // the classic covariance wind-up under weak excitation
  bool saw_reset = false;
  for (int k = 0; k < 40 && !saw_reset; ++k) {
    const double af = 1e-5;
    const auto info = est.update(8e4 * af, 0.0, af, 0.0);
    saw_reset = info.reset;
  }
  REQUIRE(saw_reset);
  REQUIRE(est.reset_count() == 1);
  REQUIRE(est.covariance()(0, 0) == cfg.p0);
  REQUIRE(est.covariance()(1, 1) == cfg.p0);
}

TEST_CASE("non-finite measurements are rejected", "[rls]") {
  RlsEstimator est;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  REQUIRE_THROWS_AS(est.update(nan, 0.0, 0.01, 0.01), std::invalid_argument);
  REQUIRE_THROWS_AS(est.update(0.0, inf, 0.01, 0.01), std::invalid_argument);
  REQUIRE_THROWS_AS(est.update(0.0, 0.0, nan, 0.01), std::invalid_argument);
  REQUIRE_THROWS_AS(est.update(0.0, 0.0, 0.01, -inf), std::invalid_argument);
}

TEST_CASE("config validation rejects bad parameters", "[rls]") {
  RlsConfig cfg;
  cfg.lambda = 0.0;
  REQUIRE_THROWS_AS(RlsEstimator(cfg), std::invalid_argument);
  cfg = {};
  cfg.lambda = 1.1;
  REQUIRE_THROWS_AS(RlsEstimator(cfg), std::invalid_argument);
  cfg = {};
  cfg.p0 = -1.0;
  REQUIRE_THROWS_AS(RlsEstimator(cfg), std::invalid_argument);
  cfg = {};
  cfg.clamp.lo = 3e5;  // above hi
  REQUIRE_THROWS_AS(RlsEstimator(cfg), std::invalid_argument);
}

TEST_CASE("forgetting tracks a mid-stream stiffness change", "[rls]") {
  RlsConfig cfg;
  cfg.lambda = 0.9;
  RlsEstimator est(cfg);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> mag(5e-3, 0.08);
  std::bernoulli_distribution flip(0.5);

  auto feed = [&](double c_f, double c_r, int n) {
    for (int k = 0; k < n; ++k) {
      const double af = (flip(rng) ? 1.0 : -1.0) * mag(rng);
      const double ar = (flip(rng) ? 1.0 : -1.0) * mag(rng);
      est.update(c_f * af, c_r * ar, af, ar);
    }
  };

  feed(1.6e5, 1.6e5, 200);
  REQUIRE(est.c_f_hat() == Approx(1.6e5).epsilon(0.01));

  // wet-road style drop; the estimator must follow
  feed(6e4, 6e4, 200);
  REQUIRE(est.c_f_hat() == Approx(6e4).epsilon(0.01));
  REQUIRE(est.c_r_hat() == Approx(6e4).epsilon(0.01));
}

TEST_CASE("reset restores the initial configuration", "[rls]") {
  RlsEstimator est;
  est.update(8e4 * 0.05 + 500.0, 8e4 * 0.05 - 300.0, 0.05, 0.05);
  REQUIRE(est.theta() != est.config().theta0);

  est.reset();
  REQUIRE(est.theta() == est.config().theta0);
  REQUIRE(est.covariance()(0, 0) == est.config().p0);
  REQUIRE(est.n_updates() == 0);
}
