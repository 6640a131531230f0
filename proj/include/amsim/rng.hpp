#pragma once

#include <cstdint>
#include <random>

namespace amsim {

// Child-stream derivation: every random consumer is seeded by mixing the
// master seed with fixed stream ids through splitmix64, so draws never
// depend on thread scheduling or on how many other consumers ran first.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t a,
                                       std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ splitmix64(a));
  h = splitmix64(h ^ splitmix64(b));
  h = splitmix64(h ^ splitmix64(c));
  return h;
}

// Stream ids used by the simulator.
inline constexpr std::uint64_t kStreamPerception = 1;
inline constexpr std::uint64_t kStreamMppi = 2;

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  double gaussian(double mean, double stddev) {
    return mean + stddev * normal_(engine_);
  }

  // Uniform in [0, 1).
  double uniform01() { return uniform_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace amsim
