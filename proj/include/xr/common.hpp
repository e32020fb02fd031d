#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace xr {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// All failures in the library surface as this type; the message names the
// offending input.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Reduce an angle to [0, 2pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, two_pi);
  if (r < 0) r += two_pi;
  if (r >= two_pi) r -= two_pi;
  return r;
}

// Shorter circular distance between two angles.
inline double circ_dist(double a, double b) {
  double d = std::fabs(wrap_angle(a - b));
  return std::min(d, two_pi - d);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for item i of a seeded stream. Each item owns its generator, so
// parallel and serial sweeps draw identical values.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t i) {
  return splitmix64(splitmix64(seed) ^ splitmix64(i + 0x632be59bd9b4e019ULL));
}

enum class Exec { serial, parallel };

} // namespace xr
