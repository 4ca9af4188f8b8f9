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
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace vdc {

/// Dense convex QP: minimize 0.5 z'Hz + f'z subject to A z <= b, H > 0.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  Eigen::MatrixXd A;  // m x n, may have zero rows
  Eigen::VectorXd b;  // m

  double objective(const Eigen::VectorXd& z) const {
    return 0.5 * z.dot(H * z) + f.dot(z);
  }
};

enum class QpStatus { optimal, infeasible, max_iter };

struct QpSolution {
  Eigen::VectorXd z;
  Eigen::VectorXd duals;  // one per constraint row, >= 0, 0 off the active set
  QpStatus status = QpStatus::max_iter;
  double kkt_residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::vector<int> active_set;
};

namespace detail {

inline double kkt_residual(const QpProblem& qp, const Eigen::VectorXd& z,
                           const Eigen::VectorXd& duals) {
  double r = (qp.H * z + qp.f + qp.A.transpose() * duals).lpNorm<Eigen::Infinity>();
  for (int i = 0; i < qp.A.rows(); ++i) {
    const double slack = qp.A.row(i).dot(z) - qp.b(i);
    r = std::max(r, slack);                        // primal feasibility
    r = std::max(r, -duals(i));                    // dual feasibility
    r = std::max(r, std::abs(duals(i) * slack));   // complementarity
  }
  return r;
}

}  // namespace detail

/// Dual active-set solve. Starts from the unconstrained minimizer (dual
/// feasible by construction), repeatedly picks the most violated primal
/// constraint (lowest index on ties) and takes primal/dual steps until it
/// joins the active set or primal infeasibility is certified by an unbounded
/// dual ray. Factorizations are refreshed on every active-set change. A warm
/// start biases which violated constraint is examined first; it cannot
/// change the returned solution, only the path to it.
inline QpSolution solve(const QpProblem& qp, const QpSolution* warm_start = nullptr,
                        int max_iter = 500) {
  const int n = static_cast<int>(qp.H.rows());
  const int m = static_cast<int>(qp.A.rows());
  if (qp.H.cols() != n || qp.f.size() != n || (m > 0 && qp.A.cols() != n) ||
      qp.b.size() != m)
    throw std::invalid_argument("qp::solve: dimension mismatch");
  if ((qp.H - qp.H.transpose()).lpNorm<Eigen::Infinity>() >
      1e-10 * (1.0 + qp.H.lpNorm<Eigen::Infinity>()))
    throw std::invalid_argument("qp::solve: H must be symmetric");

  Eigen::LLT<Eigen::MatrixXd> hllt(qp.H);
  if (hllt.info() != Eigen::Success)
    throw std::invalid_argument("qp::solve: H must be positive definite");

  QpSolution sol;
  sol.z = -hllt.solve(qp.f);
  sol.duals = Eigen::VectorXd::Zero(m);
  if (m == 0) {
    sol.status = QpStatus::optimal;
    sol.kkt_residual = detail::kkt_residual(qp, sol.z, sol.duals);
    return sol;
  }

  constexpr double feas_tol = 1e-10;
  constexpr double dual_tol = 1e-12;
  constexpr double zero_tol = 1e-11;

  std::vector<int> W;          // active rows, at equality
  std::vector<double> lam;     // multipliers for W, >= 0
  std::vector<char> hinted(m, 0);
  if (warm_start)
    for (int i : warm_start->active_set)
      if (i >= 0 && i < m) hinted[i] = 1;

  Eigen::VectorXd& z = sol.z;
  int iter = 0;

  auto violation = [&](int i) { return qp.A.row(i).dot(z) - qp.b(i); };

  // most violated constraint (lowest index on ties via strict >), searching
  // warm-start rows first; -1 when primal feasible
  auto pick_violated = [&]() {
    for (int pass = 0; pass < 2; ++pass) {
      int best = -1;
      double worst = 0.0;
      for (int i = 0; i < m; ++i) {
        if (pass == 0 && !hinted[i]) continue;
        const double v = violation(i);
        if (v > feas_tol * (1.0 + std::abs(qp.b(i))) && v > worst) {
          worst = v;
          best = i;
        }
      }
      if (best != -1) return best;
    }
    return -1;
  };

  auto drop = [&](int k) {
    W.erase(W.begin() + k);
    lam.erase(lam.begin() + k);
  };

  // re-solve the equality-constrained KKT system for the current active set,
  // zeroing accumulated step error before declaring optimality; returns the
  // index within W of a genuinely negative multiplier (row should leave), or
  // -1 when the refined point is dual feasible
  auto refine = [&]() -> int {
    if (W.empty()) {
      z = -hllt.solve(qp.f);
      return -1;
    }
    const int na = static_cast<int>(W.size());
    Eigen::MatrixXd Cw(na, n);
    Eigen::VectorXd bw(na);
    for (int k = 0; k < na; ++k) {
      Cw.row(k) = qp.A.row(W[k]);
      bw(k) = qp.b(W[k]);
    }
    const Eigen::MatrixXd HiC = hllt.solve(Cw.transpose());
    const Eigen::VectorXd Hif = hllt.solve(qp.f);
    const Eigen::MatrixXd S = Cw * HiC;
    const Eigen::VectorXd mult =
        Eigen::LDLT<Eigen::MatrixXd>(S).solve(-(bw + Cw * Hif));
    const Eigen::VectorXd znew = -hllt.solve(qp.f + Cw.transpose() * mult);
    if (!znew.allFinite() || !mult.allFinite()) return -1;
    z = znew;
    int worst = -1;
    double most_negative = -1e-9;
    for (int k = 0; k < na; ++k) {
      lam[k] = mult(k);
      if (mult(k) < most_negative) {
        most_negative = mult(k);
        worst = k;
      }
    }
    if (worst < 0)
      for (int k = 0; k < na; ++k) lam[k] = std::max(lam[k], 0.0);
    return worst;
  };

  auto finish = [&](QpStatus status) {
    sol.status = status;
    sol.duals.setZero();
    for (std::size_t k = 0; k < W.size(); ++k) sol.duals(W[k]) = lam[k];
    sol.active_set = W;
    sol.iterations = iter;
    sol.kkt_residual = detail::kkt_residual(qp, z, sol.duals);
    return sol;
  };

  while (true) {
    if (++iter > max_iter) return finish(QpStatus::max_iter);

    const int p = pick_violated();
    if (p < 0) {
      const int leaving = refine();
      if (leaving >= 0) {
        drop(leaving);
        continue;
      }
      return finish(QpStatus::optimal);
    }

    const Eigen::VectorXd cp = qp.A.row(p).transpose();
    double lam_p = 0.0;
    double viol = violation(p);

    while (true) {
      if (++iter > max_iter) return finish(QpStatus::max_iter);

      const int na = static_cast<int>(W.size());
      Eigen::VectorXd zdot(n), ldot(na);
      const Eigen::VectorXd Hic = hllt.solve(cp);
      if (na == 0) {
        zdot = -Hic;
      } else {
        Eigen::MatrixXd Cw(na, n);
        for (int k = 0; k < na; ++k) Cw.row(k) = qp.A.row(W[k]);
        const Eigen::MatrixXd HiC = hllt.solve(Cw.transpose());
        const Eigen::MatrixXd S = Cw * HiC;
        ldot = Eigen::LDLT<Eigen::MatrixXd>(S).solve(-(Cw * Hic));
        zdot = -(Hic + HiC * ldot);
        if (!ldot.allFinite() || !zdot.allFinite()) return finish(QpStatus::max_iter);
      }

      const bool primal_move =
          zdot.lpNorm<Eigen::Infinity>() > zero_tol * (1.0 + z.lpNorm<Eigen::Infinity>());

      // longest dual step before some active multiplier hits zero
      double t_block = std::numeric_limits<double>::infinity();
      int k_block = -1;
      for (int k = 0; k < na; ++k) {
        if (ldot(k) < -dual_tol) {
          const double r = lam[k] / -ldot(k);
          if (r < t_block) {
            t_block = r;
            k_block = k;
          }
        }
      }

      if (!primal_move) {
        if (k_block < 0) return finish(QpStatus::infeasible);  // unbounded dual ray
        for (int k = 0; k < na; ++k) lam[k] = std::max(lam[k] + t_block * ldot(k), 0.0);
        lam_p += t_block;
        drop(k_block);
        continue;
      }

      const double descent = cp.dot(zdot);  // = -zdot'H zdot < 0 here
      const double t_full = viol / -descent;
      const double t = std::min(t_full, t_block);

      z += t * zdot;
      for (int k = 0; k < na; ++k) lam[k] = std::max(lam[k] + t * ldot(k), 0.0);
      lam_p += t;

      if (t_full <= t_block) {
        W.push_back(p);
        lam.push_back(lam_p);
        break;
      }
      drop(k_block);
      viol = violation(p);
      if (viol <= feas_tol * (1.0 + std::abs(qp.b(p)))) {
        W.push_back(p);
        lam.push_back(lam_p);
        break;
      }
    }
  }
}

}  // namespace vdc
