// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace thzmesh {

// Purpose-tagged random sub-streams derived from one master seed.
//
// Each consumer (mobility, traffic, channel fading, exploration noise,
// weight/layout initialisation) owns a separate generator so that enabling
// or disabling one stochastic feature never shifts the draws seen by the
// others.  Two runs with the same master seed and the same sequence of
// calls are bit-identical.
enum class Stream : int {
  mobility = 0,
  traffic_volume = 1,
  traffic_offsets = 2,
  channel = 3,
  exploration = 4,
  init = 5,
};

inline constexpr int stream_count = 6;

// SplitMix64 step; used only to decorrelate the per-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class RngBank {
 public:
  explicit RngBank(std::uint64_t master_seed) {
    std::uint64_t s = master_seed;
    for (int i = 0; i < stream_count; ++i) {
      streams_[static_cast<std::size_t>(i)].seed(splitmix64(s));
    }
  }

  std::mt19937_64& stream(Stream which) {
    return streams_[static_cast<std::size_t>(which)];
  }

 private:
  std::array<std::mt19937_64, stream_count> streams_;
};

}  // namespace thzmesh
