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

#ifndef JUGGLE_BALLISTICS_HPP_
#define JUGGLE_BALLISTICS_HPP_

#include <optional>

#include "juggle/rng.hpp"
#include "juggle/types.hpp"

namespace juggle::ballistics {

enum class BallPhase { kInFlight, kInHand, kDropped };

struct BallState {
  int ball_id = -1;
  Vec3 position{};
  Vec3 velocity{};
  BallPhase phase = BallPhase::kInFlight;
  int holder_hand = -1;         // valid when phase == kInHand
  double last_event_time = 0.0; // absolute time `position`/`velocity` refer to
};

/// Predicted descending crossing of the catch plane.
struct TouchDownPrediction {
  double time = 0.0;  // absolute
  Vec3 location{};    // z equals the plane height exactly
  Vec3 velocity{};    // z component negative
};

/// Drag-free parabolic flight for dt >= 0.
BallState propagate(const BallState& state, double dt, const Vec3& gravity);

/// Ball position at absolute time t >= state.last_event_time (flight phase).
Vec3 position_at(const BallState& state, double t, const Vec3& gravity);
Vec3 velocity_at(const BallState& state, double t, const Vec3& gravity);

/// Solves the descending crossing of the horizontal plane. Returns nothing
/// when the ball is below the plane and can never come back up to it.
std::optional<TouchDownPrediction> predict_touchdown(const BallState& state, double plane_z,
                                                     const Vec3& gravity);

/// Hand take-off velocity that lands the ball (released at alpha times the
/// hand speed) on the target after the given flight time:
///   v = (target - takeoff) / (alpha T_f) - g T_f / (2 alpha).
Vec3 takeoff_velocity(const Vec3& takeoff_position, const Vec3& target_touch_down,
                      double flight_time, double alpha, const Vec3& gravity);

/// Adds isotropic Gaussian noise with per-axis standard deviation sigma.
/// sigma == 0 returns the input and draws nothing.
Vec3 disturb_takeoff(const Vec3& velocity, double sigma, RngStream& rng);

}  // namespace juggle::ballistics

#endif  // JUGGLE_BALLISTICS_HPP_
