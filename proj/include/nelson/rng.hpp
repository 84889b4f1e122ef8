#pragma once

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw, SC'11).
// Every draw is a pure function of (key, counter), so any partition of the
// work over threads reproduces the same stream.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace nelson::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Counter philox4x32_10(Counter c, Key k) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

inline Key key_from_seed(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

// Uniform in the open interval (0, 1) from 52 random bits.
inline double unit_open(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t u = (static_cast<std::uint64_t>(hi) << 20) | (lo >> 12);
  return (static_cast<double>(u) + 0.5) * 0x1.0p-52;
}

inline std::pair<double, double> uniform_pair(const Counter& c, const Key& k) {
  const auto r = philox4x32_10(c, k);
  return {unit_open(r[0], r[1]), unit_open(r[2], r[3])};
}

// Box-Muller pair of independent standard normals.
inline std::pair<double, double> normal_pair(const Counter& c, const Key& k) {
  const auto [u1, u2] = uniform_pair(c, k);
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  return {rad * std::cos(ang), rad * std::sin(ang)};
}

}  // namespace nelson::rng
