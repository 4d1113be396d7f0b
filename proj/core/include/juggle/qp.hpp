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

#ifndef JUGGLE_QP_HPP_
#define JUGGLE_QP_HPP_

#include <string>
#include <vector>

#include "juggle/types.hpp"

namespace juggle::qp {

enum class QpStatus { kOptimal, kInfeasible, kMaxIterations };

struct QpOptions {
  int max_iterations = 200;
  double bound_tolerance = 1e-10;
  double multiplier_tolerance = 1e-8;
  double rank_tolerance = 1e-11;
  int refinement_passes = 2;
};

struct QpResult {
  VecX x;
  VecX equality_multipliers;
  QpStatus status = QpStatus::kOptimal;
  int iterations = 0;
  double kkt_residual = 0.0;     // scaled stationarity residual over free variables
  double equality_residual = 0.0;
  std::vector<int> active_lower, active_upper;
  std::string note;
};

/// Minimizes 1/2 x^T H x + c^T x subject to A x = b and lower <= x <= upper.
/// H must be positive definite. Bounds are handled by a clamp/release active
/// set on individual variables; equality systems are solved by a Cholesky
/// range-space method with iterative refinement. Rank-deficient equality rows
/// are pruned when consistent and reported as infeasible otherwise.
QpResult solve_box_qp(const MatX& H, const VecX& c, const MatX& A, const VecX& b,
                      const VecX& lower, const VecX& upper, const QpOptions& options = {});

/// Independent first-order optimality check: least-squares fit of multipliers
/// for the active constraint gradients against the cost gradient. Returns the
/// scaled residual norm (small at a true optimum).
double kkt_stationarity_residual(const MatX& H, const VecX& c, const MatX& A, const VecX& x,
                                 const std::vector<int>& active_lower,
                                 const std::vector<int>& active_upper);

}  // namespace juggle::qp

#endif  // JUGGLE_QP_HPP_
