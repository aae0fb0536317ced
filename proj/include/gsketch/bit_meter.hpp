#pragma once

// Explicit bit accounting. Every sketch reports a BitMeter from measure():
//   sketch_bits      - linear state that updates as the stream arrives
//   randomness_bits  - stored seeds / hash coefficients private to the sketch
//   shared           - named randomness groups charged once per group, no
//                      matter how many sketches declare the same group
//
// Meters describe the declared shape of a sketch, not its allocation status:
// a freshly built sketch and a fully fed one measure the same.

#include <map>
#include <string>

#include "gsketch/util.hpp"

namespace gsketch {

struct BitMeter {
  u64 sketch_bits = 0;
  u64 randomness_bits = 0;
  std::map<std::string, u64> shared;

  BitMeter& operator+=(const BitMeter& o) {
    sketch_bits += o.sketch_bits;
    randomness_bits += o.randomness_bits;
    for (const auto& [group, bits] : o.shared) {
      auto [it, inserted] = shared.emplace(group, bits);
      if (!inserted && bits > it->second) it->second = bits;
    }
    return *this;
  }

  friend BitMeter operator+(BitMeter a, const BitMeter& b) { return a += b; }

  u64 shared_bits() const {
    u64 s = 0;
    for (const auto& [group, bits] : shared) s += bits;
    return s;
  }

  u64 total_randomness_bits() const { return randomness_bits + shared_bits(); }
  u64 total_bits() const { return sketch_bits + total_randomness_bits(); }
};

}  // namespace gsketch
