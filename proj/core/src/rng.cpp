#include "pickplace/rng.hpp"

#include <cmath>

namespace pickplace {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * kPi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

Vec3 Rng::unit_vec3() {
  for (;;) {
    Vec3 v(normal(), normal(), normal());
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

Quat Rng::rotation() {
  // Shoemake's method.
  const double u1 = uniform(), u2 = uniform(), u3 = uniform();
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  return canonical(Quat(b * std::cos(2.0 * kPi * u3), a * std::sin(2.0 * kPi * u2),
                        a * std::cos(2.0 * kPi * u2), b * std::sin(2.0 * kPi * u3)));
}

Quat Rng::rotation_within(double max_angle) {
  const Vec3 axis = unit_vec3();
  return rodrigues_exp(axis * uniform(0.0, max_angle));
}

Vec3 Rng::translation_within(double max_dist) { return unit_vec3() * uniform(0.0, max_dist); }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace pickplace
