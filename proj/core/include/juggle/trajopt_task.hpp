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

#ifndef JUGGLE_TRAJOPT_TASK_HPP_
#define JUGGLE_TRAJOPT_TASK_HPP_

#include <string>
#include <vector>

#include "juggle/ballistics.hpp"
#include "juggle/pattern.hpp"
#include "juggle/qp.hpp"
#include "juggle/types.hpp"

namespace juggle::trajopt_task {

/// States integrated from piece-wise constant jerk, one row per support point.
struct IntegratedStates {
  MatX positions, velocities, accelerations;  // (K+1) x dim
};

/// Explicit Euler integration of the jerk parameterization:
///   x_{k+1} = x_k + v_k dt + 1/2 a_k dt^2 + 1/6 j_k dt^3
///   v_{k+1} = v_k + a_k dt + 1/2 j_k dt^2
///   a_{k+1} = a_k + j_k dt
IntegratedStates integrate_jerk(const VecX& x0, const VecX& v0, const VecX& a0, const MatX& jerks,
                                double dt);

/// Linear maps from a scalar jerk sequence to the states at support points;
/// states are affine in the jerks, same map for every axis.
struct JerkMaps {
  MatX position, velocity, acceleration;  // (K+1) x K
};
JerkMaps build_jerk_maps(int support_count, double dt);

/// Shared assembly for jerk-parameterized min-acceleration programs.
/// Decision vector is axis-major: [jerks of axis 0 (K), axis 1 (K), ...].
class JerkProgram {
 public:
  JerkProgram(int dim, int support_count, double dt, const VecX& x0, const VecX& v0,
              const VecX& a0);

  int dim() const { return dim_; }
  int support_count() const { return support_count_; }
  double dt() const { return dt_; }
  int variables() const { return dim_ * support_count_; }

  int variable_index(int axis, int interval) const { return axis * support_count_ + interval; }

  /// Row of the decision vector producing the given state quantity at support
  /// point k on `axis`, plus the zero-jerk baseline contribution.
  void position_row(int k, int axis, VecX* row) const;
  void velocity_row(int k, int axis, VecX* row) const;
  void acceleration_row(int k, int axis, VecX* row) const;
  double position_base(int k, int axis) const { return base_.positions(k, axis); }
  double velocity_base(int k, int axis) const { return base_.velocities(k, axis); }
  double acceleration_base(int k, int axis) const { return base_.accelerations(k, axis); }

  /// Cost 1/2 j'Hj + c'j equivalent to sum_k |a_k|^2 (constant offset dropped).
  void build_cost(MatX* H, VecX* c) const;

  IntegratedStates integrate(const MatX& jerks) const;

 private:
  int dim_, support_count_;
  double dt_;
  VecX x0_, v0_, a0_;
  JerkMaps maps_;
  IntegratedStates base_;  // zero-jerk propagation of the initial state
};

enum class SolveStatus { kOptimal, kInfeasible, kMaxIterations };
std::string to_string(SolveStatus status);

/// Per-family infinity norms of constraint violations at the returned point.
struct ConstraintResiduals {
  double touch_down_position = 0;
  double take_off_position = 0;
  double take_off_velocity = 0;
  double take_off_acceleration = 0;
  double pre_touch_down_collinearity = 0;
  double post_take_off_collinearity = 0;
  double jerk_bound = 0;
  double kkt = 0;
  double max_equality() const;
};

struct TrajectorySolution {
  int dim = 3;
  int support_count = 0;
  double dt = 0;
  MatX jerks;                                  // K x dim
  MatX positions, velocities, accelerations;   // (K+1) x dim
  double cost = 0;                             // sum_k |a_k|^2 over k = 0..K
  ConstraintResiduals residuals;
  SolveStatus status = SolveStatus::kOptimal;
  int qp_iterations = 0;
  int active_bound_count = 0;
  std::string note;

  double duration() const { return dt * support_count; }
  /// Piece-wise cubic evaluation; t in [0, duration].
  void sample(double t, VecX* x, VecX* v, VecX* a) const;
  Vec3 position3(int k) const { return positions.row(k).transpose(); }
  Vec3 velocity3(int k) const { return velocities.row(k).transpose(); }
  Vec3 acceleration3(int k) const { return accelerations.row(k).transpose(); }
};

/// A support point carrying a collinearity constraint: the constrained state
/// quantity at `index` must be parallel to `reference`.
struct CollinearityPoint {
  int index = 0;
  Vec3 reference{};
};

/// One hand cycle in task space, spanning from the previous take-off (k = 0)
/// to the next take-off (k = K).
struct CycleProblem {
  Vec3 initial_position{}, initial_velocity{}, initial_acceleration{};
  double cycle_time = 0;
  int support_count = 24;
  int touch_down_index = 0;  // k_TD
  int take_off_index = 24;   // k_TO == support_count

  Vec3 touch_down_position{};  // predicted ball position at the snapped index
  Vec3 touch_down_velocity{};  // predicted ball velocity there

  std::vector<CollinearityPoint> pre_touch_down;  // hand velocity vs. ball velocity
  std::vector<CollinearityPoint> post_take_off;   // hand accel - g vs. hand normal
  Vec3 hand_normal{0, 0, 1};
  double hand_normal_angle_cap_deg = 15.0;

  Vec3 take_off_position{};       // b_TO,des
  Vec3 next_touch_down_target{};  // b_TD,des of the receiving hand
  double flight_time = 0;
  double alpha = 1.0;

  Vec3 gravity{0, 0, -9.81};
  double jerk_limit = 5000.0;  // per-axis bound on |jerk|

  double dt() const { return cycle_time / support_count; }
  void validate() const;
};

struct CycleBuildConfig {
  int support_count = 24;
  int n_post_take_off = 2;   // N_TO
  int n_pre_touch_down = 2;  // N_TD
  double jerk_limit = 5000.0;
  double hand_normal_angle_cap_deg = 15.0;
};

/// Snaps the predicted touch-down to the nearest support index, re-propagates
/// the ball to the snapped time, and assembles the cycle problem. The hand
/// normal defaults to the reversed predicted touch-down velocity direction.
/// Throws InfeasibleError when the touch-down cannot be scheduled inside the
/// cycle window.
CycleProblem build_problem(const pattern::CycleEvent& event, const ballistics::BallState& incoming,
                           const Vec3& previous_position, const Vec3& previous_velocity,
                           const Vec3& previous_acceleration, const CycleBuildConfig& config,
                           double alpha, const Vec3& gravity, double catch_plane_z);

/// Solves the convex cycle QP: minimize sum of squared accelerations subject
/// to boundary, collinearity, and jerk box constraints.
TrajectorySolution solve_cycle(const CycleProblem& problem);

/// Continuous readout of the piece-wise cubic solution at time t in [0, T_c].
void sample_trajectory(const TrajectorySolution& solution, double t, Vec3* x, Vec3* v, Vec3* a);

/// CSV export: t, position, velocity, acceleration, jerk per axis.
std::string to_csv(const TrajectorySolution& solution);

}  // namespace juggle::trajopt_task

#endif  // JUGGLE_TRAJOPT_TASK_HPP_
