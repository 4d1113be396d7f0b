// Copyright 2026 The Juggle Toolkit Authors
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

#include "juggle/qp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>

namespace juggle::qp {
namespace {

struct EqualitySolve {
  VecX x;
  VecX multipliers;  // one per row of the full A (dropped rows get zero)
  bool infeasible = false;
  std::string note;
};

// Solves min 1/2 x'Hx + c'x s.t. Ax = b with H positive definite by the
// range-space method. Dependent rows of A are pruned via a pivoted QR of A';
// pruning is only valid when the pruned rows are consistent at the solution,
// which is checked afterwards.
EqualitySolve solve_equality_qp(const MatX& H, const VecX& c, const MatX& A, const VecX& b,
                                double rank_tolerance, int refinement_passes) {
  EqualitySolve result;
  const Eigen::Index n = H.rows();
  const Eigen::Index m = A.rows();
  Eigen::LLT<MatX> llt(H);
  if (llt.info() != Eigen::Success) {
    result.infeasible = true;
    result.note = "hessian not positive definite on free variables";
    return result;
  }
  if (m == 0) {
    result.x = llt.solve(-c);
    result.multipliers.resize(0);
    return result;
  }

  // Select an independent subset of rows.
  Eigen::ColPivHouseholderQR<MatX> qr(A.transpose());
  qr.setThreshold(rank_tolerance);
  const Eigen::Index rank = qr.rank();
  std::vector<Eigen::Index> kept;
  kept.reserve(rank);
  const auto& permutation = qr.colsPermutation().indices();
  for (Eigen::Index i = 0; i < rank; ++i) kept.push_back(permutation[i]);
  std::sort(kept.begin(), kept.end());

  MatX A1(rank, n);
  VecX b1(rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    A1.row(i) = A.row(kept[i]);
    b1[i] = b[kept[i]];
  }

  const MatX Y = llt.solve(A1.transpose());
  const MatX S = A1 * Y;
  Eigen::LDLT<MatX> ldlt(S);
  if (ldlt.info() != Eigen::Success) {
    result.infeasible = true;
    result.note = "singular constraint system";
    return result;
  }

  const VecX u0 = llt.solve(c);
  VecX lambda = ldlt.solve(b1 + A1 * u0);
  VecX x = llt.solve(A1.transpose() * lambda) - u0;

  for (int pass = 0; pass < refinement_passes; ++pass) {
    const VecX r1 = H * x + c - A1.transpose() * lambda;
    const VecX r2 = A1 * x - b1;
    const VecX dlambda = ldlt.solve(-r2 + A1 * llt.solve(r1));
    const VecX dx = llt.solve(A1.transpose() * dlambda - r1);
    x += dx;
    lambda += dlambda;
  }

  // Dropped (dependent) rows must already be satisfied, otherwise the system
  // is inconsistent.
  if (rank < m) {
    const double scale = std::max({1.0, b.cwiseAbs().maxCoeff(), x.cwiseAbs().maxCoeff()});
    std::vector<bool> is_kept(m, false);
    for (const auto k : kept) is_kept[k] = true;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (is_kept[i]) continue;
      const double residual = std::abs(A.row(i).dot(x) - b[i]);
      if (residual > 1e-7 * scale) {
        result.infeasible = true;
        result.note = "inconsistent equality constraints (row " + std::to_string(i) +
                      ", residual " + std::to_string(residual) + ")";
        return result;
      }
    }
  }

  result.x = std::move(x);
  result.multipliers = VecX::Zero(m);
  for (Eigen::Index i = 0; i < rank; ++i) result.multipliers[kept[i]] = lambda[i];
  return result;
}

}  // namespace

QpResult solve_box_qp(const MatX& H, const VecX& c, const MatX& A, const VecX& b,
                      const VecX& lower, const VecX& upper, const QpOptions& options) {
  const Eigen::Index n = H.rows();
  const Eigen::Index m = A.rows();
  QpResult result;
  result.x = VecX::Zero(n);
  result.equality_multipliers = VecX::Zero(m);

  // 0 free, +1 at upper bound, -1 at lower bound.
  std::vector<int> state(n, 0);
  const double bound_scale =
      std::max({1.0, upper.cwiseAbs().maxCoeff(), lower.cwiseAbs().maxCoeff()});
  const double bound_tol = options.bound_tolerance * bound_scale;

  VecX x = VecX::Zero(n);
  VecX lambda = VecX::Zero(m);

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    result.iterations = iter;
    std::vector<Eigen::Index> free_idx;
    free_idx.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[i] == 0) free_idx.push_back(i);
    }
    const Eigen::Index nf = static_cast<Eigen::Index>(free_idx.size());

    // Fixed contribution of clamped variables.
    VecX x_fixed = VecX::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[i] > 0) x_fixed[i] = upper[i];
      if (state[i] < 0) x_fixed[i] = lower[i];
    }

    if (nf == 0) {
      x = x_fixed;
      lambda.setZero();
      const double eq_residual = m > 0 ? (A * x - b).cwiseAbs().maxCoeff() : 0.0;
      if (eq_residual > 1e-7 * std::max(1.0, b.cwiseAbs().maxCoeff())) {
        result.status = QpStatus::kInfeasible;
        result.note = "all variables at bounds, equalities unsatisfied";
        result.x = x;
        return result;
      }
    } else {
      MatX Hf(nf, nf);
      VecX cf(nf);
      for (Eigen::Index r = 0; r < nf; ++r) {
        cf[r] = c[free_idx[r]] + H.row(free_idx[r]).dot(x_fixed);
        for (Eigen::Index s = 0; s < nf; ++s) Hf(r, s) = H(free_idx[r], free_idx[s]);
      }
      MatX Af(m, nf);
      for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index s = 0; s < nf; ++s) Af(r, s) = A(r, free_idx[s]);
      }
      const VecX bf = b - A * x_fixed;

      EqualitySolve eq = solve_equality_qp(Hf, cf, Af, bf, options.rank_tolerance,
                                           options.refinement_passes);
      if (eq.infeasible) {
        result.status = QpStatus::kInfeasible;
        result.note = eq.note;
        result.x = x;
        return result;
      }
      x = x_fixed;
      for (Eigen::Index r = 0; r < nf; ++r) x[free_idx[r]] = eq.x[r];
      lambda = eq.multipliers;
    }

    // Clamp the worst bound violation, if any.
    Eigen::Index worst = -1;
    double worst_violation = bound_tol;
    int worst_side = 0;
    for (const Eigen::Index i : free_idx) {
      if (x[i] > upper[i] + worst_violation) {
        worst = i;
        worst_violation = x[i] - upper[i];
        worst_side = +1;
      }
      if (x[i] < lower[i] - worst_violation) {
        worst = i;
        worst_violation = lower[i] - x[i];
        worst_side = -1;
      }
    }
    if (worst >= 0) {
      state[worst] = worst_side;
      continue;
    }

    // All free variables within bounds; check clamped-variable multipliers.
    const VecX grad = H * x + c - A.transpose() * lambda;
    const double grad_scale = std::max(1.0, grad.cwiseAbs().maxCoeff());
    Eigen::Index release = -1;
    double release_score = options.multiplier_tolerance * grad_scale;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[i] > 0 && grad[i] > release_score) {
        release = i;
        release_score = grad[i];
      } else if (state[i] < 0 && -grad[i] > release_score) {
        release = i;
        release_score = -grad[i];
      }
    }
    if (release >= 0) {
      state[release] = 0;
      continue;
    }

    // Optimal.
    result.x = x;
    result.equality_multipliers = lambda;
    result.status = QpStatus::kOptimal;
    double kkt = 0.0;
    for (const Eigen::Index i : free_idx) kkt = std::max(kkt, std::abs(grad[i]));
    result.kkt_residual = kkt / grad_scale;
    result.equality_residual = m > 0 ? (A * x - b).cwiseAbs().maxCoeff() : 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[i] > 0) result.active_upper.push_back(static_cast<int>(i));
      if (state[i] < 0) result.active_lower.push_back(static_cast<int>(i));
    }
    return result;
  }

  result.x = x;
  result.equality_multipliers = lambda;
  result.status = QpStatus::kMaxIterations;
  result.note = "active-set iteration cap reached";
  return result;
}

double kkt_stationarity_residual(const MatX& H, const VecX& c, const MatX& A, const VecX& x,
                                 const std::vector<int>& active_lower,
                                 const std::vector<int>& active_upper) {
  const Eigen::Index n = H.rows();
  const VecX grad = H * x + c;
  const Eigen::Index m = A.rows();
  const Eigen::Index k = m + static_cast<Eigen::Index>(active_lower.size() + active_upper.size());
  const double scale = std::max(1.0, grad.cwiseAbs().maxCoeff());
  if (k == 0) return grad.cwiseAbs().maxCoeff() / scale;

  MatX G(n, k);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < m; ++i) G.col(col++) = A.row(i).transpose();
  for (const int i : active_lower) {
    G.col(col).setZero();
    G(i, col++) = -1.0;
  }
  for (const int i : active_upper) {
    G.col(col).setZero();
    G(i, col++) = 1.0;
  }
  const VecX mu = G.colPivHouseholderQr().solve(grad);
  return (grad - G * mu).cwiseAbs().maxCoeff() / scale;
}

}  // namespace juggle::qp
