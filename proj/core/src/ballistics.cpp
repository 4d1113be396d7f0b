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

#include "juggle/ballistics.hpp"

#include <cmath>
#include <stdexcept>

namespace juggle::ballistics {

BallState propagate(const BallState& state, double dt, const Vec3& gravity) {
  if (dt < 0.0) throw std::invalid_argument("propagate requires dt >= 0");
  BallState next = state;
  next.position = state.position + state.velocity * dt + 0.5 * gravity * dt * dt;
  next.velocity = state.velocity + gravity * dt;
  next.last_event_time = state.last_event_time + dt;
  return next;
}

Vec3 position_at(const BallState& state, double t, const Vec3& gravity) {
  const double dt = t - state.last_event_time;
  return state.position + state.velocity * dt + 0.5 * gravity * dt * dt;
}

Vec3 velocity_at(const BallState& state, double t, const Vec3& gravity) {
  return state.velocity + gravity * (t - state.last_event_time);
}

std::optional<TouchDownPrediction> predict_touchdown(const BallState& state, double plane_z,
                                                     const Vec3& gravity) {
  // 1/2 g_z t^2 + v_z t + (z - plane) = 0, descending root.
  const double a = 0.5 * gravity.z();
  const double b = state.velocity.z();
  const double c = state.position.z() - plane_z;
  double t = -1.0;
  if (a == 0.0) {
    if (b >= 0.0) return std::nullopt;  // no gravity, not moving down
    t = -c / b;
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return std::nullopt;  // apex below the plane
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    const double r1 = q / a;
    const double r2 = (q != 0.0) ? c / q : r1;
    // With g_z < 0 the later crossing is the descending one.
    t = std::max(r1, r2);
  }
  if (!(t > 0.0)) return std::nullopt;
  TouchDownPrediction prediction;
  prediction.time = state.last_event_time + t;
  prediction.location = state.position + state.velocity * t + 0.5 * gravity * t * t;
  prediction.location.z() = plane_z;
  prediction.velocity = state.velocity + gravity * t;
  return prediction;
}

Vec3 takeoff_velocity(const Vec3& takeoff_position, const Vec3& target_touch_down,
                      double flight_time, double alpha, const Vec3& gravity) {
  if (!(flight_time > 0.0)) throw std::invalid_argument("flight_time must be > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  return (target_touch_down - takeoff_position) / (alpha * flight_time) -
         gravity * flight_time / (2.0 * alpha);
}

Vec3 disturb_takeoff(const Vec3& velocity, double sigma, RngStream& rng) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (sigma == 0.0) return velocity;
  return velocity + rng.isotropic_normal(sigma);
}

}  // namespace juggle::ballistics
