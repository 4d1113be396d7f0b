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

#ifndef JUGGLE_ARM_HPP_
#define JUGGLE_ARM_HPP_

#include <functional>
#include <string>
#include <vector>

#include "juggle/config.hpp"
#include "juggle/types.hpp"

namespace juggle::arm {

/// Revolute joint: fixed transform from the parent joint frame, then a
/// rotation about `axis` (unit vector in the joint frame).
struct JointDescription {
  Vec3 parent_offset{};
  Mat3 parent_rotation = Mat3::Identity();
  Vec3 axis{0, 0, 1};
  double position_min = -3.0, position_max = 3.0;
  double velocity_limit = 12.0;
  double jerk_limit = 1e5;
};

/// Inertial data of the link rigidly attached after a joint, expressed in
/// that joint's rotated frame.
struct LinkInertia {
  double mass = 1.0;
  Vec3 com{};       // center of mass relative to the joint origin
  Mat3 inertia = Mat3::Identity() * 1e-3;  // about the com
};

struct ArmModel {
  std::string name = "arm";
  Vec3 base_position{};
  Mat3 base_rotation = Mat3::Identity();
  std::vector<JointDescription> joints;
  std::vector<LinkInertia> links;
  Vec3 ee_offset{};                        // hand origin in the last joint frame
  Mat3 ee_rotation = Mat3::Identity();     // hand frame; the hand normal is its +z axis
  Vec3 gravity{0, 0, -9.81};
  VecX nominal_posture;                    // IK bias, elbow-down

  int dof() const { return static_cast<int>(joints.size()); }
  double reach() const;  // conservative total link length from the base
  void validate() const;
};

ArmModel load_arm_model(const KeyValueConfig& config);
KeyValueConfig save_arm_model(const ArmModel& model);

struct JointState {
  VecX q, qd, qdd;
  static JointState Zero(int dof);
};

struct HandPose {
  Vec3 position{};
  Vec3 normal{};  // unit hand/cone axis in world coordinates
};

HandPose forward_kinematics(const ArmModel& model, const VecX& q);

/// Positional hand Jacobian, 3 x dof: v_hand = J(q) qd.
Eigen::Matrix3Xd jacobian(const ArmModel& model, const VecX& q);

/// Time derivative of the Jacobian: a_hand = J qdd + Jdot qd.
Eigen::Matrix3Xd jacobian_dot(const ArmModel& model, const VecX& q, const VecX& qd);

struct IkResult {
  VecX q;
  bool converged = false;
  int iterations = 0;
  double position_error = 0;
};

struct IkOptions {
  int max_iterations = 200;
  double tolerance = 1e-9;       // meters
  double damping = 1e-3;
  double posture_gain = 0.2;     // null-space pull toward the nominal posture
};

/// Damped least-squares position IK from the nominal posture (or the given
/// guess), with the redundancy resolved toward the nominal posture.
IkResult ik_touchdown(const ArmModel& model, const Vec3& target, const VecX* initial_guess = nullptr,
                      const IkOptions& options = {});

struct TakeoffIk {
  VecX q, qd, qdd;
  bool converged = false;
  double position_error = 0;
};

/// Take-off boundary IK: position via ik_touchdown, velocity via the
/// minimum-norm pseudo-inverse, acceleration so that the hand acceleration
/// equals gravity at release.
TakeoffIk ik_takeoff(const ArmModel& model, const Vec3& position, const Vec3& velocity,
                     const VecX* initial_guess = nullptr, const IkOptions& options = {});

/// Recursive Newton-Euler inverse dynamics: tau = M(q) qdd + c(q, qd) + g(q).
VecX inverse_dynamics(const ArmModel& model, const VecX& q, const VecX& qd, const VecX& qdd);

/// Gravity torque g(q) = inverse_dynamics(q, 0, 0).
VecX gravity_torque(const ArmModel& model, const VecX& q);

/// Joint-space mass matrix by the composite rigid body algorithm.
MatX mass_matrix(const ArmModel& model, const VecX& q);

/// Forward dynamics qdd = M^{-1} (tau - c - g).
VecX forward_dynamics(const ArmModel& model, const VecX& q, const VecX& qd, const VecX& tau);

enum class ControllerKind { kPd, kPdGravity, kPdFeedforward, kInverseDynamics };
ControllerKind controller_kind_from_string(const std::string& name);
std::string to_string(ControllerKind kind);

struct ControllerSpec {
  ControllerKind kind = ControllerKind::kInverseDynamics;
  VecX kp, kd;                 // positive diagonal gains
  double control_rate_hz = 500.0;
};

/// Default gains: per joint, the linearized closed loop is critically damped
/// at `bandwidth_hz`. PD-family gains are torque-level and scale with the
/// diagonal inertia at the nominal posture; the inverse-dynamics law takes
/// acceleration-level gains.
ControllerSpec default_controller(const ArmModel& model, ControllerKind kind,
                                  double bandwidth_hz = 10.0);

/// The four tracking laws. `model` is the controller's dynamics model, which
/// may differ from the simulated plant.
VecX control_torque(const ControllerSpec& spec, const ArmModel& model, const JointState& desired,
                    const JointState& measured);

/// Fixed-step RK4 integrator for the rigid-body plant with zero-order-hold
/// torque. Physics substeps run at >= `physics_rate_hz`.
class ArmSimulator {
 public:
  ArmSimulator(ArmModel plant, double physics_rate_hz = 2000.0);

  void reset(const VecX& q, const VecX& qd);
  /// Advances by `duration` holding `torque` constant.
  void step(const VecX& torque, double duration);

  const VecX& q() const { return q_; }
  const VecX& qd() const { return qd_; }
  /// Acceleration under the given torque at the current state.
  VecX qdd(const VecX& torque) const;
  double time() const { return time_; }
  const ArmModel& plant() const { return plant_; }

  /// True when any joint speed exceeds 10x its limit.
  bool diverged() const;

 private:
  ArmModel plant_;
  double max_step_;
  VecX q_, qd_;
  double time_ = 0.0;
};

/// Runs a torque source through the simulator at the controller rate and
/// returns the sampled trajectory (one entry per control tick).
std::vector<JointState> simulate_arm_dynamics(
    const ArmModel& plant, const std::function<VecX(double, const JointState&)>& torque_source,
    const JointState& initial, double duration, double control_rate_hz = 500.0,
    double physics_rate_hz = 2000.0);

// Shipped models.
ArmModel make_default_arm(int side);  // side: -1 left (y < 0), +1 right
ArmModel make_planar_two_link(double l1, double l2, double m1, double m2, double inertia1,
                              double inertia2);

}  // namespace juggle::arm

#endif  // JUGGLE_ARM_HPP_
