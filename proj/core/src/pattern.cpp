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

#include "juggle/pattern.hpp"

#include <cmath>
#include <stdexcept>

#include "juggle/csv.hpp"

namespace juggle::pattern {
namespace {

int positive_mod(long long value, int modulus) {
  const long long m = static_cast<long long>(modulus);
  return static_cast<int>(((value % m) + m) % m);
}

void check_parity(const PatternSpec& spec, PatternKind kind) {
  const bool odd = spec.n_balls % 2 == 1;
  if (kind == PatternKind::kCascade && !odd) {
    throw InfeasibleError("cascade requires an odd ball count, got " +
                          std::to_string(spec.n_balls));
  }
  if (kind == PatternKind::kFountain && odd) {
    throw InfeasibleError("fountain requires an even ball count, got " +
                          std::to_string(spec.n_balls));
  }
}

}  // namespace

PatternKind pattern_kind_from_string(const std::string& name) {
  if (name == "cascade") return PatternKind::kCascade;
  if (name == "fountain") return PatternKind::kFountain;
  throw std::invalid_argument("unknown pattern kind `" + name + "` (cascade|fountain)");
}

std::string to_string(PatternKind kind) {
  return kind == PatternKind::kCascade ? "cascade" : "fountain";
}

void PatternSpec::validate() const {
  if (n_balls < 1) throw std::invalid_argument("n_balls must be positive");
  if (n_hands < 1) throw std::invalid_argument("n_hands must be positive");
  if (!(dwell_ratio > 0.0 && dwell_ratio < 1.0)) {
    throw std::invalid_argument("dwell_ratio must lie in (0,1)");
  }
  if (!(throw_height > 0.0)) throw std::invalid_argument("throw_height must be > 0");
  if (!(ball_radius > 0.0)) throw std::invalid_argument("ball_radius must be > 0");
  if (carry_distance < 0.0) throw std::invalid_argument("carry_distance must be >= 0");
  if (crossing_distance < 0.0) throw std::invalid_argument("crossing_distance must be >= 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (!(gravity.z() < 0.0)) throw std::invalid_argument("gravity must point downward (g_z < 0)");
}

PatternSpec load_pattern_spec(const KeyValueConfig& config) {
  PatternSpec spec;
  spec.n_balls = config.get_int("n_balls", spec.n_balls);
  spec.n_hands = config.get_int("n_hands", spec.n_hands);
  spec.dwell_ratio = config.get_double("dwell_ratio", spec.dwell_ratio);
  spec.throw_height = config.get_double("throw_height", spec.throw_height);
  spec.ball_radius = config.get_double("ball_radius", spec.ball_radius);
  spec.carry_distance = config.get_double("carry_distance", spec.carry_distance);
  spec.crossing_distance = config.get_double("crossing_distance", spec.crossing_distance);
  spec.catch_plane_height = config.get_double("catch_plane_height", spec.catch_plane_height);
  spec.alpha = config.get_double("alpha", spec.alpha);
  spec.gravity = config.get_vec3("gravity", spec.gravity);
  spec.validate();
  return spec;
}

KeyValueConfig save_pattern_spec(const PatternSpec& spec) {
  KeyValueConfig config;
  config.set("n_balls", std::to_string(spec.n_balls));
  config.set("n_hands", std::to_string(spec.n_hands));
  config.set_double("dwell_ratio", spec.dwell_ratio);
  config.set_double("throw_height", spec.throw_height);
  config.set_double("ball_radius", spec.ball_radius);
  config.set_double("carry_distance", spec.carry_distance);
  config.set_double("crossing_distance", spec.crossing_distance);
  config.set_double("catch_plane_height", spec.catch_plane_height);
  config.set_double("alpha", spec.alpha);
  config.set("gravity", format_double(spec.gravity.x()) + ", " + format_double(spec.gravity.y()) +
                            ", " + format_double(spec.gravity.z()));
  return config;
}

PatternTiming derive_timing(const PatternSpec& spec, PatternKind kind) {
  spec.validate();
  PatternTiming timing;
  const double g = std::abs(spec.gravity.z());
  timing.flight_time = 2.0 * std::sqrt(2.0 * spec.throw_height / g);
  timing.balls_in_air =
      static_cast<double>(spec.n_balls) / static_cast<double>(spec.n_hands) - spec.dwell_ratio;
  if (timing.balls_in_air <= 0.0) {
    throw InfeasibleError("pattern has no airborne balls: N_b/N_h - R = " +
                          format_double(timing.balls_in_air));
  }
  timing.cycle_time = timing.flight_time / timing.balls_in_air;
  timing.dwell_time = spec.dwell_ratio * timing.cycle_time;
  timing.vacant_time = timing.cycle_time - timing.dwell_time;
  timing.travel_distance = compute_geometry(spec, kind).travel_distance;
  timing.ball_spacing = ball_spacing(timing.travel_distance, timing.balls_in_air, spec.ball_radius);
  return timing;
}

int max_balls(double travel_distance, double ball_radius, double dwell_ratio) {
  if (!(travel_distance > 0.0)) throw std::invalid_argument("travel_distance must be > 0");
  if (!(ball_radius > 0.0)) throw std::invalid_argument("ball_radius must be > 0");
  if (!(dwell_ratio > 0.0 && dwell_ratio < 1.0)) {
    throw std::invalid_argument("dwell_ratio must lie in (0,1)");
  }
  const double bound = travel_distance / ball_radius + 2.0 * dwell_ratio;
  // Largest integer strictly below the bound; exact-integer bounds step down.
  return static_cast<int>(std::ceil(bound - 1e-12)) - 1;
}

double ball_spacing(double travel_distance, double balls_in_air, double ball_radius) {
  if (!(balls_in_air > 0.0)) throw std::invalid_argument("balls_in_air must be > 0");
  return travel_distance / balls_in_air - 2.0 * ball_radius;
}

HandStations compute_geometry(const PatternSpec& spec, PatternKind kind) {
  spec.validate();
  check_parity(spec, kind);
  if (spec.n_hands != 2) {
    throw std::invalid_argument("station layout is defined for 2 hands, got " +
                                std::to_string(spec.n_hands));
  }
  HandStations stations;
  const double half = spec.crossing_distance / 2.0;
  const double z = spec.catch_plane_height;
  for (int hand = 0; hand < 2; ++hand) {
    const double side = hand == 0 ? -1.0 : 1.0;
    stations.throw_station[hand] = Vec3(0.0, side * half, z);
    stations.catch_station[hand] = Vec3(0.0, side * (half + spec.carry_distance), z);
  }
  if (kind == PatternKind::kCascade) {
    // Throws cross: inner throw station to the partner's outer catch station.
    stations.travel_distance = spec.crossing_distance + spec.carry_distance;
  } else {
    // Fountain throws return to the same hand; only the carry matters.
    stations.travel_distance = spec.carry_distance;
  }
  return stations;
}

std::vector<HandSchedule> generate_schedule(const PatternSpec& spec, PatternKind kind,
                                            int horizon_cycles) {
  if (horizon_cycles < 1) throw std::invalid_argument("horizon_cycles must be >= 1");
  const PatternTiming timing = derive_timing(spec, kind);
  const HandStations stations = compute_geometry(spec, kind);
  if (timing.ball_spacing <= 0.0) {
    throw InfeasibleError(
        "infeasible ball spacing d_b = " + format_double(timing.ball_spacing) + " m for " +
        std::to_string(spec.n_balls) + " balls at d_f = " +
        format_double(timing.travel_distance) + " m (bound: " +
        std::to_string(max_balls(timing.travel_distance, spec.ball_radius, spec.dwell_ratio)) +
        " balls)");
  }

  const double half_cycle = timing.cycle_time / 2.0;
  // Global throw n happens at T_d + n * T_c/2, alternating hands. Throws at
  // t >= 0 belong to the schedule; for dwell ratios >= 1/2 that includes the
  // n = -1 throw whose catch predates the horizon.
  const long long n_min = (timing.dwell_time - half_cycle >= -1e-12 * timing.cycle_time) ? -1 : 0;

  std::vector<HandSchedule> schedules(2);
  for (int hand = 0; hand < 2; ++hand) {
    schedules[hand].hand_id = hand;
    schedules[hand].events.reserve(horizon_cycles);
    long long n = n_min;
    if (positive_mod(n, 2) != hand) ++n;
    for (int cycle = 0; cycle < horizon_cycles; ++cycle, n += 2) {
      CycleEvent event;
      event.take_off_time = timing.dwell_time + static_cast<double>(n) * half_cycle;
      event.touch_down_time = event.take_off_time - timing.dwell_time;
      event.touch_down_location = stations.catch_station[hand];
      event.take_off_location = stations.throw_station[hand];
      event.target_hand = kind == PatternKind::kCascade ? 1 - hand : hand;
      event.target_touch_down_location = stations.catch_station[event.target_hand];
      event.flight_time = timing.flight_time;
      event.cycle_time = timing.cycle_time;
      event.incoming_ball_id = positive_mod(n, spec.n_balls);
      event.outgoing_ball_id = event.incoming_ball_id;
      schedules[hand].events.push_back(event);
    }
  }
  return schedules;
}

}  // namespace juggle::pattern
