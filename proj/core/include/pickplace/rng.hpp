#pragma once

#include <cstdint>
#include <random>

#include "pickplace/geom3.hpp"

namespace pickplace {

// Portable seeded generator. std::mt19937_64 has a fully specified output
// sequence; the distributions are implemented here because the standard
// library ones differ between implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  Vec3 normal_vec3(double sigma) { return {normal(0.0, sigma), normal(0.0, sigma), normal(0.0, sigma)}; }
  Vec3 unit_vec3();
  Quat rotation();  // uniform over SO(3)

  /// Rotation about a uniformly random axis with angle drawn uniformly from [0, max_angle].
  Quat rotation_within(double max_angle);
  /// Translation with direction uniform on the sphere and length uniform in [0, max_dist].
  Vec3 translation_within(double max_dist);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Independent child seed for sub-stream `stream` (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace pickplace
