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

#include <Eigen/Geometry>
#include <sstream>

#include "juggle/arm.hpp"
#include "juggle/csv.hpp"

namespace juggle::arm {
namespace {

Mat3 rpy_to_matrix(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

Vec3 matrix_to_rpy(const Mat3& R) {
  // Inverse of Rz(yaw) Ry(pitch) Rx(roll).
  const double pitch = std::asin(std::min(1.0, std::max(-1.0, -R(2, 0))));
  double roll, yaw;
  if (std::abs(std::cos(pitch)) > 1e-9) {
    roll = std::atan2(R(2, 1), R(2, 2));
    yaw = std::atan2(R(1, 0), R(0, 0));
  } else {
    roll = std::atan2(-R(1, 2), R(1, 1));
    yaw = 0.0;
  }
  return Vec3(roll, pitch, yaw);
}

std::string vec3_text(const Vec3& v) {
  return format_double(v.x()) + ", " + format_double(v.y()) + ", " + format_double(v.z());
}

Mat3 inertia_from_list(const std::vector<double>& values, const std::string& key) {
  if (values.size() != 3 && values.size() != 6) {
    throw ConfigError(key + ": expected 3 (diagonal) or 6 (xx,yy,zz,xy,xz,yz) numbers");
  }
  Mat3 I = Mat3::Zero();
  I(0, 0) = values[0];
  I(1, 1) = values[1];
  I(2, 2) = values[2];
  if (values.size() == 6) {
    I(0, 1) = I(1, 0) = values[3];
    I(0, 2) = I(2, 0) = values[4];
    I(1, 2) = I(2, 1) = values[5];
  }
  return I;
}

}  // namespace

ArmModel load_arm_model(const KeyValueConfig& config) {
  ArmModel model;
  model.name = config.get_string("name", "arm");
  const int dof = config.get_int("dof");
  model.base_position = config.get_vec3("base.position", Vec3::Zero());
  model.base_rotation = rpy_to_matrix(config.get_vec3("base.rpy", Vec3::Zero()));
  model.gravity = config.get_vec3("gravity", Vec3(0, 0, -9.81));
  model.ee_offset = config.get_vec3("ee.offset", Vec3::Zero());
  model.ee_rotation = rpy_to_matrix(config.get_vec3("ee.rpy", Vec3::Zero()));

  model.joints.resize(dof);
  model.links.resize(dof);
  for (int i = 0; i < dof; ++i) {
    const std::string joint_key = "joint" + std::to_string(i);
    auto& joint = model.joints[i];
    joint.parent_offset = config.get_vec3(joint_key + ".offset", Vec3::Zero());
    joint.parent_rotation = rpy_to_matrix(config.get_vec3(joint_key + ".rpy", Vec3::Zero()));
    joint.axis = config.get_vec3(joint_key + ".axis").normalized();
    const auto limits = config.get_double_list(joint_key + ".limits");
    if (limits.size() != 2) {
      throw ConfigError(joint_key + ".limits: expected `min, max`");
    }
    joint.position_min = limits[0];
    joint.position_max = limits[1];
    joint.velocity_limit = config.get_double(joint_key + ".velocity_limit", 12.0);
    joint.jerk_limit = config.get_double(joint_key + ".jerk_limit", 1e5);

    const std::string link_key = "link" + std::to_string(i);
    auto& link = model.links[i];
    link.mass = config.get_double(link_key + ".mass");
    link.com = config.get_vec3(link_key + ".com");
    link.inertia = inertia_from_list(config.get_double_list(link_key + ".inertia"),
                                     link_key + ".inertia");
  }

  const auto posture = config.get_double_list("nominal_posture");
  if (static_cast<int>(posture.size()) != dof) {
    throw ConfigError("nominal_posture: expected " + std::to_string(dof) + " values");
  }
  model.nominal_posture.resize(dof);
  for (int i = 0; i < dof; ++i) model.nominal_posture[i] = posture[i];
  model.validate();
  return model;
}

KeyValueConfig save_arm_model(const ArmModel& model) {
  KeyValueConfig config;
  config.set("name", model.name);
  config.set("dof", std::to_string(model.dof()));
  config.set("base.position", vec3_text(model.base_position));
  config.set("base.rpy", vec3_text(matrix_to_rpy(model.base_rotation)));
  config.set("gravity", vec3_text(model.gravity));
  config.set("ee.offset", vec3_text(model.ee_offset));
  config.set("ee.rpy", vec3_text(matrix_to_rpy(model.ee_rotation)));
  for (int i = 0; i < model.dof(); ++i) {
    const std::string joint_key = "joint" + std::to_string(i);
    const auto& joint = model.joints[i];
    config.set(joint_key + ".offset", vec3_text(joint.parent_offset));
    config.set(joint_key + ".rpy", vec3_text(matrix_to_rpy(joint.parent_rotation)));
    config.set(joint_key + ".axis", vec3_text(joint.axis));
    config.set(joint_key + ".limits",
               format_double(joint.position_min) + ", " + format_double(joint.position_max));
    config.set_double(joint_key + ".velocity_limit", joint.velocity_limit);
    config.set_double(joint_key + ".jerk_limit", joint.jerk_limit);
    const std::string link_key = "link" + std::to_string(i);
    const auto& link = model.links[i];
    config.set_double(link_key + ".mass", link.mass);
    config.set(link_key + ".com", vec3_text(link.com));
    std::ostringstream inertia;
    inertia << format_double(link.inertia(0, 0)) << ", " << format_double(link.inertia(1, 1))
            << ", " << format_double(link.inertia(2, 2)) << ", "
            << format_double(link.inertia(0, 1)) << ", " << format_double(link.inertia(0, 2))
            << ", " << format_double(link.inertia(1, 2));
    config.set(link_key + ".inertia", inertia.str());
  }
  std::ostringstream posture;
  for (int i = 0; i < model.dof(); ++i) {
    if (i > 0) posture << ", ";
    posture << format_double(model.nominal_posture[i]);
  }
  config.set("nominal_posture", posture.str());
  return config;
}

ArmModel make_default_arm(int side) {
  if (side != -1 && side != 1) throw std::invalid_argument("side must be -1 or +1");
  ArmModel model;
  model.name = side < 0 ? "arm4_left" : "arm4_right";
  // Two shoulders 0.76 m apart, mounted behind and above the catch plane.
  model.base_position = Vec3(-0.30, side * 0.38, 0.55);
  model.base_rotation = Mat3::Identity();
  model.gravity = Vec3(0, 0, -9.81);

  model.joints.resize(4);
  model.links.resize(4);

  // Shoulder yaw.
  model.joints[0].parent_offset = Vec3::Zero();
  model.joints[0].axis = Vec3::UnitZ();
  model.joints[0].position_min = -2.8;
  model.joints[0].position_max = 2.8;
  // Shoulder pitch.
  model.joints[1].parent_offset = Vec3::Zero();
  model.joints[1].axis = Vec3::UnitY();
  model.joints[1].position_min = -2.0;
  model.joints[1].position_max = 2.0;
  // Humeral roll about the upper-arm axis.
  model.joints[2].parent_offset = Vec3::Zero();
  model.joints[2].axis = Vec3::UnitZ();
  model.joints[2].position_min = -2.8;
  model.joints[2].position_max = 2.8;
  // Elbow flexion; the upper arm extends 0.55 m down the roll axis.
  model.joints[3].parent_offset = Vec3(0, 0, -0.55);
  model.joints[3].axis = Vec3::UnitY();
  model.joints[3].position_min = -2.9;
  model.joints[3].position_max = 0.3;
  for (auto& joint : model.joints) {
    joint.velocity_limit = 14.0;
    joint.jerk_limit = 1e5;
  }

  // Forearm of 0.45 m; the hand funnel axis is the end-effector +z, which
  // points up when the forearm is horizontal.
  model.ee_offset = Vec3(0, 0, -0.45);
  model.ee_rotation = Eigen::AngleAxisd(kPi / 2.0, Vec3::UnitY()).toRotationMatrix();

  model.links[0].mass = 2.5;
  model.links[0].com = Vec3(0, 0, -0.03);
  model.links[0].inertia = Vec3(0.020, 0.020, 0.015).asDiagonal();
  model.links[1].mass = 2.5;
  model.links[1].com = Vec3(0, 0, -0.05);
  model.links[1].inertia = Vec3(0.020, 0.020, 0.015).asDiagonal();
  model.links[2].mass = 5.0;
  model.links[2].com = Vec3(0, 0, -0.275);
  model.links[2].inertia = Vec3(0.130, 0.130, 0.010).asDiagonal();
  model.links[3].mass = 3.0;
  model.links[3].com = Vec3(0, 0, -0.20);
  model.links[3].inertia = Vec3(0.050, 0.050, 0.006).asDiagonal();

  model.nominal_posture.resize(4);
  model.nominal_posture << -0.2 * side, 0.35, 0.0, -1.85;
  model.validate();
  return model;
}

ArmModel make_planar_two_link(double l1, double l2, double m1, double m2, double inertia1,
                              double inertia2) {
  ArmModel model;
  model.name = "planar2";
  model.base_position = Vec3::Zero();
  model.gravity = Vec3(0, 0, -9.81);
  model.joints.resize(2);
  model.links.resize(2);
  // Rotation about -y moves the x-z plane like the textbook planar chain with
  // angles measured from +x toward +z.
  model.joints[0].parent_offset = Vec3::Zero();
  model.joints[0].axis = -Vec3::UnitY();
  model.joints[0].position_min = -kPi * 2;
  model.joints[0].position_max = kPi * 2;
  model.joints[1].parent_offset = Vec3(l1, 0, 0);
  model.joints[1].axis = -Vec3::UnitY();
  model.joints[1].position_min = -kPi * 2;
  model.joints[1].position_max = kPi * 2;
  for (auto& joint : model.joints) {
    joint.velocity_limit = 50.0;
    joint.jerk_limit = 1e6;
  }
  model.ee_offset = Vec3(l2, 0, 0);
  model.ee_rotation = Mat3::Identity();
  model.links[0].mass = m1;
  model.links[0].com = Vec3(l1, 0, 0);  // point mass at the link tip
  model.links[0].inertia = Mat3::Identity() * inertia1;
  model.links[1].mass = m2;
  model.links[1].com = Vec3(l2, 0, 0);
  model.links[1].inertia = Mat3::Identity() * inertia2;
  model.nominal_posture = VecX::Zero(2);
  model.validate();
  return model;
}

}  // namespace juggle::arm
