// Copyright 2026 The eshpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ESHPC_QP_HPP_
#define ESHPC_QP_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <vector>

#include "eshpc/core.hpp"

namespace eshpc {

/// Convex QP: min ½ zᵀHz + gᵀz subject to Cz ≤ d, with H ≻ 0.
struct QpProblem {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd constraints;  // rows cᵢᵀ
  Eigen::VectorXd bounds;       // dᵢ
};

enum class QpStatus { Optimal, IterationLimit, NumericFailure };

struct QpResult {
  Eigen::VectorXd z;
  Eigen::VectorXd lambda;  // one multiplier per constraint row, ≥ 0
  QpStatus status = QpStatus::NumericFailure;
  int iterations = 0;
  double kkt_residual = std::numeric_limits<double>::infinity();
};

/// Independently recomputed KKT residual (stationarity, primal feasibility,
/// dual feasibility, complementarity) — used for verification, not by the
/// solver's own stopping test.
inline double qp_kkt_residual(const QpProblem& qp, const Eigen::VectorXd& z,
                              const Eigen::VectorXd& lambda) {
  const Eigen::VectorXd stat =
      qp.hessian * z + qp.gradient + qp.constraints.transpose() * lambda;
  double r = stat.lpNorm<Eigen::Infinity>();
  if (qp.constraints.rows() > 0) {
    const Eigen::VectorXd slack = qp.constraints * z - qp.bounds;
    r = std::max(r, slack.cwiseMax(0.0).lpNorm<Eigen::Infinity>());
    r = std::max(r, std::max(0.0, -lambda.minCoeff()));
    r = std::max(r, lambda.cwiseProduct(slack).lpNorm<Eigen::Infinity>());
  }
  return r;
}

/// Primal active-set method for strictly convex QPs. Requires a primal
/// feasible starting point. Deterministic: ties in blocking-constraint and
/// multiplier selection break toward the lowest row index.
class DenseActiveSetQp {
 public:
  struct Options {
    double tolerance = 1e-9;
    int max_iterations = 400;
  };

  DenseActiveSetQp() = default;
  explicit DenseActiveSetQp(const Options& opts) : opts_(opts) {}

  QpResult solve(const QpProblem& qp, const Eigen::VectorXd& z0) const {
    const int n = static_cast<int>(qp.hessian.rows());
    const int m = static_cast<int>(qp.constraints.rows());
    QpResult res;
    res.z = z0;
    res.lambda = Eigen::VectorXd::Zero(m);

    Eigen::LLT<Eigen::MatrixXd> hchol(qp.hessian);
    if (hchol.info() != Eigen::Success) {
      res.status = QpStatus::NumericFailure;
      return res;
    }

    std::vector<int> working;  // active row indices, kept sorted by insertion
    Eigen::VectorXd lam_w;

    for (res.iterations = 0; res.iterations < opts_.max_iterations;
         ++res.iterations) {
      const Eigen::VectorXd grad = qp.hessian * res.z + qp.gradient;
      const Eigen::VectorXd hinv_grad = hchol.solve(grad);

      Eigen::VectorXd p;
      const int nw = static_cast<int>(working.size());
      if (nw == 0) {
        p = -hinv_grad;
        lam_w.resize(0);
      } else {
        Eigen::MatrixXd cw(nw, n);
        for (int i = 0; i < nw; ++i) cw.row(i) = qp.constraints.row(working[i]);
        const Eigen::MatrixXd y = hchol.solve(cw.transpose());
        Eigen::MatrixXd s = cw * y;
        s.diagonal().array() += 1e-13;  // guards near-dependent rows
        Eigen::LLT<Eigen::MatrixXd> schol(s);
        if (schol.info() != Eigen::Success) {
          res.status = QpStatus::NumericFailure;
          return res;
        }
        lam_w = schol.solve(-cw * hinv_grad);
        p = -hinv_grad - y * lam_w;
      }

      if (p.lpNorm<Eigen::Infinity>() < opts_.tolerance) {
        // Stationary on the working set; check multiplier signs.
        int drop = -1;
        double most_negative = -opts_.tolerance;
        for (int i = 0; i < nw; ++i) {
          if (lam_w(i) < most_negative) {
            most_negative = lam_w(i);
            drop = i;
          }
        }
        if (drop < 0) {
          res.lambda.setZero();
          for (int i = 0; i < nw; ++i)
            res.lambda(working[i]) = std::max(0.0, lam_w(i));
          res.status = QpStatus::Optimal;
          res.kkt_residual = qp_kkt_residual(qp, res.z, res.lambda);
          return res;
        }
        working.erase(working.begin() + drop);
        continue;
      }

      // Ratio test over rows not in the working set.
      double alpha = 1.0;
      int blocking = -1;
      for (int i = 0; i < m; ++i) {
        bool in_w = false;
        for (int j : working) in_w |= (j == i);
        if (in_w) continue;
        const double cp = qp.constraints.row(i).dot(p);
        if (cp <= opts_.tolerance) continue;
        const double gap = std::max(0.0, qp.bounds(i) - qp.constraints.row(i).dot(res.z));
        const double a = gap / cp;
        if (a < alpha - 1e-15) {
          alpha = a;
          blocking = i;
        }
      }
      res.z += alpha * p;
      if (blocking >= 0) working.push_back(blocking);
    }

    res.status = QpStatus::IterationLimit;
    res.kkt_residual = qp_kkt_residual(qp, res.z, res.lambda);
    return res;
  }

 private:
  Options opts_{};
};

}  // namespace eshpc

#endif  // ESHPC_QP_HPP_
