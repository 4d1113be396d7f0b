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

#include "juggle/trajopt_joint.hpp"

#include <cmath>
#include <stdexcept>

#include "juggle/qp.hpp"

namespace juggle::trajopt_joint {
namespace {

using trajopt_task::IntegratedStates;
using trajopt_task::JerkProgram;
using trajopt_task::SolveStatus;
using trajopt_task::TrajectorySolution;

Vec3 hand_velocity(const arm::ArmModel& model, const VecX& q, const VecX& qd) {
  return arm::jacobian(model, q) * qd;
}

Vec3 hand_acceleration(const arm::ArmModel& model, const VecX& q, const VecX& qd,
                       const VecX& qdd) {
  return arm::jacobian(model, q) * qdd + arm::jacobian_dot(model, q, qd) * qd;
}

int largest_component(const Vec3& v) {
  int index = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(v[i]) > std::abs(v[index])) index = i;
  }
  return index;
}

// Two independent components of u x r, skipping `drop`.
Eigen::Vector2d cross_pair(const Vec3& u, const Vec3& r, int drop) {
  const Vec3 full = u.cross(r);
  Eigen::Vector2d pair;
  int out = 0;
  for (int c = 0; c < 3; ++c) {
    if (c == drop) continue;
    pair[out++] = full[c];
  }
  return pair;
}

struct NonlinearPoint {
  int index = 0;
  bool pre_touch_down = false;  // otherwise post-take-off
  Vec3 ball_velocity{};         // pre-touch-down reference
};

// Constraint value at one support point given the local joint state.
Eigen::Vector2d evaluate_point(const NonlinearPoint& point, const arm::ArmModel& model,
                               const Vec3& gravity, const VecX& q, const VecX& qd,
                               const VecX& qdd, int drop) {
  if (point.pre_touch_down) {
    return cross_pair(hand_velocity(model, q, qd), point.ball_velocity, drop);
  }
  const Vec3 u = hand_acceleration(model, q, qd, qdd) - gravity;
  return cross_pair(u, arm::forward_kinematics(model, q).normal, drop);
}

Vec3 full_residual(const NonlinearPoint& point, const arm::ArmModel& model, const Vec3& gravity,
                   const VecX& q, const VecX& qd, const VecX& qdd) {
  if (point.pre_touch_down) {
    return hand_velocity(model, q, qd).cross(point.ball_velocity);
  }
  const Vec3 u = hand_acceleration(model, q, qd, qdd) - gravity;
  return u.cross(arm::forward_kinematics(model, q).normal);
}

}  // namespace

void JointCycleProblem::validate(int dof) const {
  if (support_count < 4) throw std::invalid_argument("support_count must be >= 4");
  if (!(cycle_time > 0.0)) throw std::invalid_argument("cycle_time must be > 0");
  if (!(touch_down_index > 0 && touch_down_index < support_count)) {
    throw std::invalid_argument("touch_down_index must satisfy 0 < k_TD < K");
  }
  if (initial.q.size() != dof || touch_down_q.size() != dof || take_off.q.size() != dof) {
    throw std::invalid_argument("joint state dimension mismatch");
  }
  if (jerk_limit.size() != dof) throw std::invalid_argument("jerk_limit dimension mismatch");
  for (const auto& point : pre_touch_down) {
    if (point.index < 1 || point.index >= touch_down_index) {
      throw std::invalid_argument("pre-touch-down index outside (0, k_TD)");
    }
  }
  for (const int index : post_take_off_indices) {
    if (index < 1 || index >= touch_down_index) {
      throw std::invalid_argument("post-take-off index outside (0, k_TD)");
    }
  }
}

JointSolveResult solve_cycle_joint(const JointCycleProblem& problem, const arm::ArmModel& model,
                                   const JointSolveOptions& options) {
  const int n = model.dof();
  problem.validate(n);
  const int K = problem.support_count;
  const double dt = problem.dt();

  JerkProgram program(n, K, dt, problem.initial.q, problem.initial.qd, problem.initial.qdd);
  MatX H;
  VecX c;
  program.build_cost(&H, &c);

  // Boundary rows are exact and constant across iterations.
  std::vector<VecX> linear_rows;
  std::vector<double> linear_rhs;
  VecX row(program.variables());
  const auto add_rows = [&](int k, int kind, const VecX& target) {
    for (int axis = 0; axis < n; ++axis) {
      double base = 0;
      if (kind == 0) {
        program.position_row(k, axis, &row);
        base = program.position_base(k, axis);
      } else if (kind == 1) {
        program.velocity_row(k, axis, &row);
        base = program.velocity_base(k, axis);
      } else {
        program.acceleration_row(k, axis, &row);
        base = program.acceleration_base(k, axis);
      }
      linear_rows.push_back(row);
      linear_rhs.push_back(target[axis] - base);
    }
  };
  add_rows(problem.touch_down_index, 0, problem.touch_down_q);
  add_rows(K, 0, problem.take_off.q);
  add_rows(K, 1, problem.take_off.qd);
  add_rows(K, 2, problem.take_off.qdd);

  std::vector<NonlinearPoint> points;
  for (const auto& pre : problem.pre_touch_down) {
    points.push_back({pre.index, true, pre.velocity});
  }
  for (const int index : problem.post_take_off_indices) {
    points.push_back({index, false, Vec3::Zero()});
  }

  VecX lower(program.variables()), upper(program.variables());
  for (int axis = 0; axis < n; ++axis) {
    lower.segment(axis * K, K).setConstant(-problem.jerk_limit[axis]);
    upper.segment(axis * K, K).setConstant(problem.jerk_limit[axis]);
  }

  JointSolveResult result;
  result.solution.dim = n;
  result.solution.support_count = K;
  result.solution.dt = dt;

  const auto solve_qp = [&](const std::vector<VecX>& rows, const std::vector<double>& rhs,
                            qp::QpResult* qp_result) {
    MatX A(static_cast<Eigen::Index>(rows.size()), program.variables());
    VecX b(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      A.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
      b[static_cast<Eigen::Index>(i)] = rhs[i];
    }
    *qp_result = qp::solve_box_qp(H, c, A, b, lower, upper);
    return qp_result->status == qp::QpStatus::kOptimal;
  };

  // Initial iterate: boundary constraints only (a smooth joint interpolation
  // between the IK states).
  qp::QpResult qp_result;
  if (!solve_qp(linear_rows, linear_rhs, &qp_result)) {
    result.note = "initialization QP failed: " + qp_result.note;
    result.solution.status = SolveStatus::kInfeasible;
    return result;
  }
  VecX iterate = qp_result.x;

  const auto unpack = [&](const VecX& j) {
    MatX jerks(K, n);
    for (int axis = 0; axis < n; ++axis) jerks.col(axis) = j.segment(axis * K, K);
    return jerks;
  };

  double step_norm = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  IntegratedStates states = program.integrate(unpack(iterate));

  for (int iter = 1; iter <= options.max_sqp_iterations; ++iter) {
    result.sqp_iterations = iter;

    // Evaluate and linearize the kinematic constraints about the iterate.
    std::vector<VecX> rows = linear_rows;
    std::vector<double> rhs = linear_rhs;
    for (const auto& point : points) {
      const int k = point.index;
      VecX q = states.positions.row(k).transpose();
      VecX qd = states.velocities.row(k).transpose();
      VecX qdd = states.accelerations.row(k).transpose();
      const Vec3 reference = point.pre_touch_down
                                 ? point.ball_velocity
                                 : Vec3(arm::forward_kinematics(model, q).normal);
      const int drop = largest_component(reference);
      const Eigen::Vector2d value =
          evaluate_point(point, model, problem.gravity, q, qd, qdd, drop);

      // Central finite differences of the 2-component constraint with respect
      // to the local joint state.
      MatX dq(2, n), dqd(2, n), dqdd(2, n);
      const double eps = options.fd_epsilon;
      for (int axis = 0; axis < n; ++axis) {
        VecX qp_ = q, qm_ = q;
        qp_[axis] += eps;
        qm_[axis] -= eps;
        dq.col(axis) = (evaluate_point(point, model, problem.gravity, qp_, qd, qdd, drop) -
                        evaluate_point(point, model, problem.gravity, qm_, qd, qdd, drop)) /
                       (2 * eps);
        VecX vp = qd, vm = qd;
        vp[axis] += eps;
        vm[axis] -= eps;
        dqd.col(axis) = (evaluate_point(point, model, problem.gravity, q, vp, qdd, drop) -
                         evaluate_point(point, model, problem.gravity, q, vm, qdd, drop)) /
                        (2 * eps);
        if (!point.pre_touch_down) {
          VecX ap = qdd, am = qdd;
          ap[axis] += eps;
          am[axis] -= eps;
          dqdd.col(axis) = (evaluate_point(point, model, problem.gravity, q, qd, ap, drop) -
                            evaluate_point(point, model, problem.gravity, q, qd, am, drop)) /
                           (2 * eps);
        } else {
          dqdd.col(axis).setZero();
        }
      }

      // Chain through the jerk-to-state maps to get rows over the decisions.
      for (int comp = 0; comp < 2; ++comp) {
        VecX constraint_row = VecX::Zero(program.variables());
        VecX tmp(program.variables());
        for (int axis = 0; axis < n; ++axis) {
          if (dq(comp, axis) != 0.0) {
            program.position_row(k, axis, &tmp);
            constraint_row += dq(comp, axis) * tmp;
          }
          if (dqd(comp, axis) != 0.0) {
            program.velocity_row(k, axis, &tmp);
            constraint_row += dqd(comp, axis) * tmp;
          }
          if (dqdd(comp, axis) != 0.0) {
            program.acceleration_row(k, axis, &tmp);
            constraint_row += dqdd(comp, axis) * tmp;
          }
        }
        rows.push_back(constraint_row);
        rhs.push_back(constraint_row.dot(iterate) - value[comp]);
      }
    }

    if (!solve_qp(rows, rhs, &qp_result)) {
      result.note = "SQP subproblem failed: " + qp_result.note;
      result.solution.status = qp_result.status == qp::QpStatus::kInfeasible
                                   ? SolveStatus::kInfeasible
                                   : SolveStatus::kMaxIterations;
      break;
    }
    step_norm = (qp_result.x - iterate).cwiseAbs().maxCoeff();
    iterate = qp_result.x;
    states = program.integrate(unpack(iterate));

    residual = 0.0;
    for (const auto& point : points) {
      const VecX q = states.positions.row(point.index).transpose();
      const VecX qd = states.velocities.row(point.index).transpose();
      const VecX qdd = states.accelerations.row(point.index).transpose();
      residual = std::max(residual, full_residual(point, model, problem.gravity, q, qd, qdd)
                                        .cwiseAbs()
                                        .maxCoeff());
    }
    result.residual_history.push_back(residual);

    if (residual < options.constraint_tolerance && step_norm < options.step_tolerance) {
      result.converged = true;
      result.solution.status = SolveStatus::kOptimal;
      break;
    }
  }

  if (!result.converged && result.note.empty()) {
    result.note = "SQP did not converge: residual " + format_double(residual) + ", step " +
                  format_double(step_norm);
    result.solution.status = SolveStatus::kMaxIterations;
  }

  result.solution.jerks = unpack(iterate);
  result.solution.positions = states.positions;
  result.solution.velocities = states.velocities;
  result.solution.accelerations = states.accelerations;
  result.solution.cost = states.accelerations.squaredNorm();
  result.solution.qp_iterations = qp_result.iterations;
  result.solution.active_bound_count =
      static_cast<int>(qp_result.active_lower.size() + qp_result.active_upper.size());
  result.solution.residuals.kkt = qp_result.kkt_residual;

  auto& res = result.solution.residuals;
  res.touch_down_position =
      (states.positions.row(problem.touch_down_index).transpose() - problem.touch_down_q)
          .cwiseAbs()
          .maxCoeff();
  res.take_off_position =
      (states.positions.row(K).transpose() - problem.take_off.q).cwiseAbs().maxCoeff();
  res.take_off_velocity =
      (states.velocities.row(K).transpose() - problem.take_off.qd).cwiseAbs().maxCoeff();
  res.take_off_acceleration =
      (states.accelerations.row(K).transpose() - problem.take_off.qdd).cwiseAbs().maxCoeff();
  result.kinematic_residual = 0.0;
  for (const auto& point : points) {
    const VecX q = states.positions.row(point.index).transpose();
    const VecX qd = states.velocities.row(point.index).transpose();
    const VecX qdd = states.accelerations.row(point.index).transpose();
    const double value =
        full_residual(point, model, problem.gravity, q, qd, qdd).cwiseAbs().maxCoeff();
    result.kinematic_residual = std::max(result.kinematic_residual, value);
    if (point.pre_touch_down) {
      res.pre_touch_down_collinearity = std::max(res.pre_touch_down_collinearity, value);
    } else {
      res.post_take_off_collinearity = std::max(res.post_take_off_collinearity, value);
    }
  }
  res.jerk_bound = 0.0;
  for (int axis = 0; axis < n; ++axis) {
    res.jerk_bound =
        std::max(res.jerk_bound, result.solution.jerks.col(axis).cwiseAbs().maxCoeff() -
                                     problem.jerk_limit[axis]);
  }
  res.jerk_bound = std::max(0.0, res.jerk_bound);

  result.within_joint_limits = true;
  for (int k = 0; k <= K; ++k) {
    for (int axis = 0; axis < n; ++axis) {
      if (states.positions(k, axis) < model.joints[axis].position_min - 1e-9 ||
          states.positions(k, axis) > model.joints[axis].position_max + 1e-9) {
        result.within_joint_limits = false;
      }
    }
  }
  return result;
}

}  // namespace juggle::trajopt_joint
