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

#ifndef JUGGLE_PATTERN_HPP_
#define JUGGLE_PATTERN_HPP_

#include <array>
#include <string>
#include <vector>

#include "juggle/config.hpp"
#include "juggle/types.hpp"

namespace juggle::pattern {

enum class PatternKind { kCascade, kFountain };

PatternKind pattern_kind_from_string(const std::string& name);
std::string to_string(PatternKind kind);

/// Juggling pattern definition. All lengths in meters, times in seconds.
struct PatternSpec {
  int n_balls = 3;
  int n_hands = 2;
  double dwell_ratio = 0.5;        // R, fraction of the hand cycle spent holding a ball
  double throw_height = 0.8;       // apex height above the catch plane
  double ball_radius = 0.0375;
  double carry_distance = 0.10;    // horizontal hand displacement while holding the ball
  double crossing_distance = 0.52; // lateral gap between the two hands' throw stations
  double catch_plane_height = 0.0; // z of the horizontal catch plane
  double alpha = 1.0;              // take-off energy-storage compensation, ball speed = alpha * hand speed
  Vec3 gravity{0.0, 0.0, -9.81};

  void validate() const;  // throws std::invalid_argument on malformed fields
};

PatternSpec load_pattern_spec(const KeyValueConfig& config);
KeyValueConfig save_pattern_spec(const PatternSpec& spec);

/// Derived timing quantities of a pattern.
struct PatternTiming {
  double flight_time = 0;      // T_f
  double cycle_time = 0;       // T_c
  double dwell_time = 0;       // T_d
  double vacant_time = 0;      // T_v
  double balls_in_air = 0;     // W, average airborne balls per hand
  double travel_distance = 0;  // d_f, horizontal take-off -> touch-down distance
  double ball_spacing = 0;     // d_b, surface gap between consecutive airborne balls
};

/// One catch/throw cycle of a single hand.
struct CycleEvent {
  double touch_down_time = 0;
  Vec3 touch_down_location{};         // nominal catch station
  double take_off_time = 0;
  Vec3 take_off_location{};           // throw station
  Vec3 target_touch_down_location{};  // receiving hand's catch station
  double flight_time = 0;
  double cycle_time = 0;
  int incoming_ball_id = -1;
  int outgoing_ball_id = -1;
  int target_hand = -1;
};

struct HandSchedule {
  int hand_id = -1;
  std::vector<CycleEvent> events;
};

/// Station layout on the catch plane. Hands sit on the y axis, symmetric
/// about the torso midline: throw stations at +/- crossing_distance/2 and
/// catch stations outboard of them by the carry distance.
struct HandStations {
  std::array<Vec3, 2> catch_station{};
  std::array<Vec3, 2> throw_station{};
  double travel_distance = 0;  // d_f
};

/// Computes all timing identities from the spec. Rejects patterns with no
/// airborne balls (W <= 0).
PatternTiming derive_timing(const PatternSpec& spec, PatternKind kind);

/// Largest ball count N_b satisfying the kinematic bound N_b < d_f/r_b + 2R.
/// Independent of throw height.
int max_balls(double travel_distance, double ball_radius, double dwell_ratio);

/// d_f / W - 2 r_b; negative means the pattern is infeasible.
double ball_spacing(double travel_distance, double balls_in_air, double ball_radius);

/// Nominal take-off and touch-down stations for each hand. Enforces the
/// parity rule (cascade: odd ball count, fountain: even).
HandStations compute_geometry(const PatternSpec& spec, PatternKind kind);

/// Generates `horizon_cycles` catch/throw events per hand. The two hands are
/// phase-shifted by T_c/2. Throws are indexed globally; the ball thrown at
/// global index n is n mod N_b, which lands back in a hand N_b half-cycles
/// later. Rejects infeasible spacing (d_b <= 0).
std::vector<HandSchedule> generate_schedule(const PatternSpec& spec, PatternKind kind,
                                            int horizon_cycles);

}  // namespace juggle::pattern

#endif  // JUGGLE_PATTERN_HPP_
