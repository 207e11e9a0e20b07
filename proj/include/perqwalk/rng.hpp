#pragma once

// Counter-based deterministic random streams. Substreams are derived by
// hashing (master seed, trajectory, step), so Monte Carlo runs are
// bitwise-reproducible independent of thread count.

#include <cstdint>

namespace perqwalk {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
  return splitmix64(s);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// One independent substream per (trajectory, step).
inline RngStream substream(std::uint64_t master, std::uint64_t trajectory,
                           std::uint64_t step) {
  return RngStream(hash_combine(hash_combine(master, trajectory), step));
}

}  // namespace perqwalk
