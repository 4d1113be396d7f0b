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

#include "juggle/arm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace juggle::arm {
namespace {

/// World-frame kinematic data of every joint frame.
struct FrameData {
  std::vector<Mat3> rotation;
  std::vector<Vec3> origin;
  std::vector<Vec3> axis;  // world rotation axis of each joint
  Vec3 ee_position{};
  Mat3 ee_rotation = Mat3::Identity();
};

FrameData compute_frames(const ArmModel& model, const VecX& q) {
  const int n = model.dof();
  FrameData frames;
  frames.rotation.resize(n);
  frames.origin.resize(n);
  frames.axis.resize(n);
  Mat3 R = model.base_rotation;
  Vec3 p = model.base_position;
  for (int i = 0; i < n; ++i) {
    const auto& joint = model.joints[i];
    p += R * joint.parent_offset;
    R = R * joint.parent_rotation;
    frames.axis[i] = R * joint.axis;
    R = R * Eigen::AngleAxisd(q[i], joint.axis).toRotationMatrix();
    frames.origin[i] = p;
    frames.rotation[i] = R;
  }
  frames.ee_position = p + R * model.ee_offset;
  frames.ee_rotation = R * model.ee_rotation;
  return frames;
}

/// Parallel-axis term: inertia of a point mass m at offset d, about the origin.
Mat3 parallel_axis(double mass, const Vec3& d) {
  return mass * (d.squaredNorm() * Mat3::Identity() - d * d.transpose());
}

}  // namespace

JointState JointState::Zero(int dof) {
  JointState state;
  state.q = VecX::Zero(dof);
  state.qd = VecX::Zero(dof);
  state.qdd = VecX::Zero(dof);
  return state;
}

double ArmModel::reach() const {
  double total = ee_offset.norm();
  for (std::size_t i = 1; i < joints.size(); ++i) total += joints[i].parent_offset.norm();
  return total;
}

void ArmModel::validate() const {
  if (joints.empty()) throw std::invalid_argument("arm model has no joints");
  if (links.size() != joints.size()) {
    throw std::invalid_argument("arm model needs one link per joint");
  }
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (std::abs(joints[i].axis.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("joint " + std::to_string(i) + " axis is not unit length");
    }
    if (joints[i].position_min >= joints[i].position_max) {
      throw std::invalid_argument("joint " + std::to_string(i) + " has empty position range");
    }
    if (!(links[i].mass > 0.0)) {
      throw std::invalid_argument("link " + std::to_string(i) + " mass must be > 0");
    }
    const Mat3& inertia = links[i].inertia;
    if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
      throw std::invalid_argument("link " + std::to_string(i) + " inertia is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eigen(inertia);
    if (eigen.eigenvalues().minCoeff() <= 0.0) {
      throw std::invalid_argument("link " + std::to_string(i) +
                                  " inertia is not positive definite");
    }
  }
  if (nominal_posture.size() != dof()) {
    throw std::invalid_argument("nominal_posture size mismatch");
  }
}

HandPose forward_kinematics(const ArmModel& model, const VecX& q) {
  const FrameData frames = compute_frames(model, q);
  HandPose pose;
  pose.position = frames.ee_position;
  pose.normal = frames.ee_rotation.col(2);
  return pose;
}

Eigen::Matrix3Xd jacobian(const ArmModel& model, const VecX& q) {
  const FrameData frames = compute_frames(model, q);
  const int n = model.dof();
  Eigen::Matrix3Xd J(3, n);
  for (int i = 0; i < n; ++i) {
    J.col(i) = frames.axis[i].cross(frames.ee_position - frames.origin[i]);
  }
  return J;
}

Eigen::Matrix3Xd jacobian_dot(const ArmModel& model, const VecX& q, const VecX& qd) {
  const FrameData frames = compute_frames(model, q);
  const int n = model.dof();
  // Forward velocity pass: link angular velocities and joint-origin velocities.
  std::vector<Vec3> w(n), vo(n), axis_rate(n);
  Vec3 w_prev = Vec3::Zero(), vo_prev = Vec3::Zero();
  Vec3 origin_prev = model.base_position;
  for (int i = 0; i < n; ++i) {
    vo[i] = vo_prev + w_prev.cross(frames.origin[i] - origin_prev);
    axis_rate[i] = w_prev.cross(frames.axis[i]);
    w[i] = w_prev + frames.axis[i] * qd[i];
    w_prev = w[i];
    vo_prev = vo[i];
    origin_prev = frames.origin[i];
  }
  const Vec3 v_ee = vo[n - 1] + w[n - 1].cross(frames.ee_position - frames.origin[n - 1]);
  Eigen::Matrix3Xd Jdot(3, n);
  for (int i = 0; i < n; ++i) {
    Jdot.col(i) = axis_rate[i].cross(frames.ee_position - frames.origin[i]) +
                  frames.axis[i].cross(v_ee - vo[i]);
  }
  return Jdot;
}

VecX inverse_dynamics(const ArmModel& model, const VecX& q, const VecX& qd, const VecX& qdd) {
  const int n = model.dof();
  const FrameData frames = compute_frames(model, q);

  // Forward pass with the base accelerating at -g, which injects gravity
  // everywhere without a separate potential term.
  std::vector<Vec3> w(n), wd(n), ao(n), ac(n), com(n);
  Vec3 w_prev = Vec3::Zero(), wd_prev = Vec3::Zero();
  Vec3 ao_prev = -model.gravity;
  Vec3 origin_prev = model.base_position;
  for (int i = 0; i < n; ++i) {
    const Vec3& a = frames.axis[i];
    const Vec3 d = frames.origin[i] - origin_prev;
    ao[i] = ao_prev + wd_prev.cross(d) + w_prev.cross(w_prev.cross(d));
    w[i] = w_prev + a * qd[i];
    wd[i] = wd_prev + a * qdd[i] + w_prev.cross(a) * qd[i];
    const Vec3 r = frames.rotation[i] * model.links[i].com;
    com[i] = frames.origin[i] + r;
    ac[i] = ao[i] + wd[i].cross(r) + w[i].cross(w[i].cross(r));
    w_prev = w[i];
    wd_prev = wd[i];
    ao_prev = ao[i];
    origin_prev = frames.origin[i];
  }

  // Backward pass: accumulate forces and moments toward the base.
  VecX tau(n);
  Vec3 f_child = Vec3::Zero(), n_child = Vec3::Zero();
  Vec3 child_origin = Vec3::Zero();
  for (int i = n - 1; i >= 0; --i) {
    const Mat3 inertia_world =
        frames.rotation[i] * model.links[i].inertia * frames.rotation[i].transpose();
    const Vec3 F = model.links[i].mass * ac[i];
    const Vec3 N = inertia_world * wd[i] + w[i].cross(inertia_world * w[i]);
    Vec3 moment = N + (com[i] - frames.origin[i]).cross(F);
    if (i < n - 1) {
      moment += n_child + (child_origin - frames.origin[i]).cross(f_child);
    }
    const Vec3 force = F + f_child;
    tau[i] = moment.dot(frames.axis[i]);
    f_child = force;
    n_child = moment;
    child_origin = frames.origin[i];
  }
  return tau;
}

VecX gravity_torque(const ArmModel& model, const VecX& q) {
  const int n = model.dof();
  return inverse_dynamics(model, q, VecX::Zero(n), VecX::Zero(n));
}

MatX mass_matrix(const ArmModel& model, const VecX& q) {
  const int n = model.dof();
  const FrameData frames = compute_frames(model, q);

  // Composite rigid bodies from the tip: mass, com, inertia about the com.
  std::vector<double> comp_mass(n);
  std::vector<Vec3> comp_com(n);
  std::vector<Mat3> comp_inertia(n);
  for (int i = n - 1; i >= 0; --i) {
    const double m = model.links[i].mass;
    const Vec3 c = frames.origin[i] + frames.rotation[i] * model.links[i].com;
    const Mat3 I =
        frames.rotation[i] * model.links[i].inertia * frames.rotation[i].transpose();
    if (i == n - 1) {
      comp_mass[i] = m;
      comp_com[i] = c;
      comp_inertia[i] = I;
    } else {
      const double mc = m + comp_mass[i + 1];
      const Vec3 cc = (m * c + comp_mass[i + 1] * comp_com[i + 1]) / mc;
      comp_inertia[i] = I + parallel_axis(m, c - cc) + comp_inertia[i + 1] +
                        parallel_axis(comp_mass[i + 1], comp_com[i + 1] - cc);
      comp_mass[i] = mc;
      comp_com[i] = cc;
    }
  }

  MatX M = MatX::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    // Unit acceleration of joint i spins composite i about its axis.
    const Vec3& a = frames.axis[i];
    const Vec3 arm = comp_com[i] - frames.origin[i];
    const Vec3 F = comp_mass[i] * a.cross(arm);
    const Vec3 N = comp_inertia[i] * a;
    for (int j = 0; j <= i; ++j) {
      const Vec3 moment = N + (comp_com[i] - frames.origin[j]).cross(F);
      M(j, i) = frames.axis[j].dot(moment);
      M(i, j) = M(j, i);
    }
  }
  return M;
}

VecX forward_dynamics(const ArmModel& model, const VecX& q, const VecX& qd, const VecX& tau) {
  const VecX bias = inverse_dynamics(model, q, qd, VecX::Zero(model.dof()));
  const MatX M = mass_matrix(model, q);
  return Eigen::LDLT<MatX>(M).solve(tau - bias);
}

IkResult ik_touchdown(const ArmModel& model, const Vec3& target, const VecX* initial_guess,
                      const IkOptions& options) {
  const int n = model.dof();
  IkResult result;
  result.q = initial_guess != nullptr ? *initial_guess : model.nominal_posture;

  const FrameData frames = compute_frames(model, result.q);
  if ((target - frames.origin[0]).norm() > model.reach() * 1.05) {
    result.position_error = (target - frames.origin[0]).norm();
    return result;  // clearly unreachable
  }

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    result.iterations = iter;
    const HandPose pose = forward_kinematics(model, result.q);
    const Vec3 error = target - pose.position;
    result.position_error = error.norm();
    if (result.position_error < options.tolerance) {
      result.converged = true;
      return result;
    }
    const Eigen::Matrix3Xd J = jacobian(model, result.q);
    const Mat3 JJt =
        J * J.transpose() + options.damping * options.damping * Mat3::Identity();
    const Mat3 JJt_inv = JJt.inverse();
    const MatX J_pinv = J.transpose() * JJt_inv;  // n x 3 damped pseudo-inverse
    VecX dq = J_pinv * error;
    // Null-space pull toward the nominal posture resolves the redundancy.
    const MatX null_projector = MatX::Identity(n, n) - J_pinv * J;
    dq += options.posture_gain * (null_projector * (model.nominal_posture - result.q));
    const double step_norm = dq.cwiseAbs().maxCoeff();
    if (step_norm > 0.5) dq *= 0.5 / step_norm;
    result.q += dq;
    for (int i = 0; i < n; ++i) {
      result.q[i] =
          std::min(std::max(result.q[i], model.joints[i].position_min), model.joints[i].position_max);
    }
  }
  const HandPose pose = forward_kinematics(model, result.q);
  result.position_error = (target - pose.position).norm();
  result.converged = result.position_error < options.tolerance;
  return result;
}

namespace {

MatX pseudo_inverse(const Eigen::Matrix3Xd& J) {
  Eigen::JacobiSVD<MatX> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cutoff = 1e-8 * svd.singularValues().maxCoeff();
  VecX inv = svd.singularValues();
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    inv[i] = inv[i] > cutoff ? 1.0 / inv[i] : 0.0;
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

TakeoffIk ik_takeoff(const ArmModel& model, const Vec3& position, const Vec3& velocity,
                     const VecX* initial_guess, const IkOptions& options) {
  TakeoffIk result;
  const IkResult position_ik = ik_touchdown(model, position, initial_guess, options);
  result.q = position_ik.q;
  result.converged = position_ik.converged;
  result.position_error = position_ik.position_error;
  if (!result.converged) {
    result.qd = VecX::Zero(model.dof());
    result.qdd = VecX::Zero(model.dof());
    return result;
  }
  const Eigen::Matrix3Xd J = jacobian(model, result.q);
  const MatX J_pinv = pseudo_inverse(J);
  result.qd = J_pinv * velocity;
  const Eigen::Matrix3Xd Jdot = jacobian_dot(model, result.q, result.qd);
  // Hand acceleration equals gravity at release: J qdd = g - Jdot qd.
  result.qdd = J_pinv * (model.gravity - Jdot * result.qd);
  return result;
}

ControllerKind controller_kind_from_string(const std::string& name) {
  if (name == "pd") return ControllerKind::kPd;
  if (name == "pdg" || name == "pd+g") return ControllerKind::kPdGravity;
  if (name == "pdff" || name == "pd+ff") return ControllerKind::kPdFeedforward;
  if (name == "id") return ControllerKind::kInverseDynamics;
  throw std::invalid_argument("unknown controller `" + name + "` (pd|pdg|pdff|id)");
}

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kPd:
      return "pd";
    case ControllerKind::kPdGravity:
      return "pdg";
    case ControllerKind::kPdFeedforward:
      return "pdff";
    case ControllerKind::kInverseDynamics:
      return "id";
  }
  return "unknown";
}

ControllerSpec default_controller(const ArmModel& model, ControllerKind kind,
                                  double bandwidth_hz) {
  const int n = model.dof();
  const double omega = 2.0 * kPi * bandwidth_hz;
  ControllerSpec spec;
  spec.kind = kind;
  spec.kp.resize(n);
  spec.kd.resize(n);
  if (kind == ControllerKind::kInverseDynamics) {
    spec.kp.setConstant(omega * omega);
    spec.kd.setConstant(2.0 * omega);
  } else {
    const MatX M = mass_matrix(model, model.nominal_posture);
    for (int i = 0; i < n; ++i) {
      spec.kp[i] = M(i, i) * omega * omega;
      spec.kd[i] = 2.0 * M(i, i) * omega;
    }
  }
  return spec;
}

VecX control_torque(const ControllerSpec& spec, const ArmModel& model, const JointState& desired,
                    const JointState& measured) {
  const VecX e = desired.q - measured.q;
  const VecX ed = desired.qd - measured.qd;
  const VecX feedback = spec.kp.cwiseProduct(e) + spec.kd.cwiseProduct(ed);
  switch (spec.kind) {
    case ControllerKind::kPd:
      return feedback;
    case ControllerKind::kPdGravity:
      return feedback + gravity_torque(model, measured.q);
    case ControllerKind::kPdFeedforward:
      return feedback + inverse_dynamics(model, desired.q, desired.qd, desired.qdd);
    case ControllerKind::kInverseDynamics:
      // Feedback acts as the reference acceleration fed through the model.
      return inverse_dynamics(model, measured.q, measured.qd, feedback);
  }
  return feedback;
}

ArmSimulator::ArmSimulator(ArmModel plant, double physics_rate_hz)
    : plant_(std::move(plant)), max_step_(1.0 / physics_rate_hz) {
  q_ = plant_.nominal_posture;
  qd_ = VecX::Zero(plant_.dof());
}

void ArmSimulator::reset(const VecX& q, const VecX& qd) {
  q_ = q;
  qd_ = qd;
  time_ = 0.0;
}

void ArmSimulator::step(const VecX& torque, double duration) {
  if (duration <= 0.0) return;
  const int substeps = std::max(1, static_cast<int>(std::ceil(duration / max_step_ - 1e-12)));
  const double h = duration / substeps;
  for (int s = 0; s < substeps; ++s) {
    const VecX k1q = qd_;
    const VecX k1v = forward_dynamics(plant_, q_, qd_, torque);
    const VecX k2q = qd_ + 0.5 * h * k1v;
    const VecX k2v = forward_dynamics(plant_, q_ + 0.5 * h * k1q, qd_ + 0.5 * h * k1v, torque);
    const VecX k3q = qd_ + 0.5 * h * k2v;
    const VecX k3v = forward_dynamics(plant_, q_ + 0.5 * h * k2q, qd_ + 0.5 * h * k2v, torque);
    const VecX k4q = qd_ + h * k3v;
    const VecX k4v = forward_dynamics(plant_, q_ + h * k3q, qd_ + h * k3v, torque);
    q_ += (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    qd_ += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
  time_ += duration;
}

VecX ArmSimulator::qdd(const VecX& torque) const {
  return forward_dynamics(plant_, q_, qd_, torque);
}

bool ArmSimulator::diverged() const {
  for (int i = 0; i < plant_.dof(); ++i) {
    if (std::abs(qd_[i]) > 10.0 * plant_.joints[i].velocity_limit) return true;
  }
  return false;
}

std::vector<JointState> simulate_arm_dynamics(
    const ArmModel& plant, const std::function<VecX(double, const JointState&)>& torque_source,
    const JointState& initial, double duration, double control_rate_hz, double physics_rate_hz) {
  ArmSimulator simulator(plant, physics_rate_hz);
  simulator.reset(initial.q, initial.qd);
  const double tick = 1.0 / control_rate_hz;
  const int ticks = static_cast<int>(std::ceil(duration / tick - 1e-9));
  std::vector<JointState> trajectory;
  trajectory.reserve(ticks + 1);
  JointState measured = initial;
  trajectory.push_back(measured);
  for (int k = 0; k < ticks; ++k) {
    const double t = k * tick;
    const VecX torque = torque_source(t, measured);
    const double dt = std::min(tick, duration - t);
    simulator.step(torque, dt);
    measured.q = simulator.q();
    measured.qd = simulator.qd();
    measured.qdd = simulator.qdd(torque);
    trajectory.push_back(measured);
  }
  return trajectory;
}

}  // namespace juggle::arm
