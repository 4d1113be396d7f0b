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

#ifndef JUGGLE_TRAJOPT_JOINT_HPP_
#define JUGGLE_TRAJOPT_JOINT_HPP_

#include <vector>

#include "juggle/arm.hpp"
#include "juggle/trajopt_task.hpp"
#include "juggle/types.hpp"

namespace juggle::trajopt_joint {

/// Ball-velocity reference for a pre-touch-down collinearity constraint.
struct BallVelocityPoint {
  int index = 0;     // support point k_TD - i
  Vec3 velocity{};   // predicted ball velocity at that support time
};

/// One hand cycle in joint space. Boundary joint states come from IK and are
/// independent of the decision variables.
struct JointCycleProblem {
  arm::JointState initial;       // state at the previous take-off (k = 0)
  double cycle_time = 0;
  int support_count = 24;
  int touch_down_index = 0;      // k_TD

  VecX touch_down_q;             // q at k_TD
  arm::JointState take_off;      // q, qd, qdd at k_TO = K

  std::vector<BallVelocityPoint> pre_touch_down;  // hand velocity x ball velocity = 0
  std::vector<int> post_take_off_indices;         // (hand accel - g) x e_hand(q) = 0
  Vec3 gravity{0, 0, -9.81};
  VecX jerk_limit;               // per-joint bound

  double dt() const { return cycle_time / support_count; }
  void validate(int dof) const;
};

struct JointSolveOptions {
  int max_sqp_iterations = 50;
  double constraint_tolerance = 1e-6;
  double step_tolerance = 1e-8;
  double fd_epsilon = 1e-6;
};

struct JointSolveResult {
  trajopt_task::TrajectorySolution solution;  // dim = dof
  bool converged = false;
  int sqp_iterations = 0;
  double kinematic_residual = 0;              // max collinearity violation via FK
  std::vector<double> residual_history;
  bool within_joint_limits = true;
  std::string note;
};

/// Sequential quadratic optimization: the exact quadratic acceleration cost
/// with kinematic collinearity constraints linearized about the current
/// iterate, solved with the task-space QP machinery until the full nonlinear
/// residual and the step norm are below tolerance.
JointSolveResult solve_cycle_joint(const JointCycleProblem& problem, const arm::ArmModel& model,
                                   const JointSolveOptions& options = {});

}  // namespace juggle::trajopt_joint

#endif  // JUGGLE_TRAJOPT_JOINT_HPP_
