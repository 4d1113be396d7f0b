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

#ifndef JUGGLE_RNG_HPP_
#define JUGGLE_RNG_HPP_

#include <cstdint>
#include <random>

#include "juggle/types.hpp"

namespace juggle {

/// Mixes a seed and a stream id into a new 64-bit seed (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_id);

/// Deterministic random stream. Gaussian variates use an explicit Box-Muller
/// transform instead of std::normal_distribution so that the draw sequence is
/// pinned by this code, not by the standard library implementation.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Uniform double in [0, 1).
  double uniform();

  /// Standard normal variate.
  double normal();

  /// 3-vector with independent N(0, sigma^2) components.
  Vec3 isotropic_normal(double sigma);

  /// Derives an independent child stream; depends only on the construction
  /// seed and the id, never on how many values were drawn so far.
  RngStream fork(std::uint64_t stream_id) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace juggle

#endif  // JUGGLE_RNG_HPP_
