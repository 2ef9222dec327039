#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace rtmvdr {

/// splitmix64 finalizer; used to derive independent substream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic per-index generator: streams for distinct (seed, domain,
/// index) tuples are decorrelated and independent of iteration order.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t domain,
                                 std::uint64_t index) {
  std::uint64_t s = mix64(seed ^ mix64(domain ^ mix64(index)));
  return std::mt19937_64(s);
}

/// Substream domain tags, one per consumer of randomness.
namespace stream {
constexpr std::uint64_t kSnapshots = 0x534e4150;
constexpr std::uint64_t kTextures = 0x54455854;
constexpr std::uint64_t kCalibration = 0x43414c42;
constexpr std::uint64_t kTrials = 0x5452494c;
constexpr std::uint64_t kEquivalent = 0x45515556;
}  // namespace stream

/// Uniform on (0,1); never returns 0 so log() is safe.
inline double uniform01(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

/// Box-Muller pair of independent standard normals.
inline std::pair<double, double> normal_pair(std::mt19937_64& gen) {
  double u1 = uniform01(gen);
  double u2 = uniform01(gen);
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

inline double standard_normal(std::mt19937_64& gen) {
  return normal_pair(gen).first;
}

/// Standard circular complex Gaussian vector with unit-variance entries,
/// i.e. E|w_k|^2 = 1 (real/imag parts each N(0, 1/2)).
inline Eigen::VectorXcd complex_gaussian(int n, std::mt19937_64& gen) {
  Eigen::VectorXcd w(n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < n; ++k) {
    auto [a, b] = normal_pair(gen);
    w(k) = std::complex<double>(a * inv_sqrt2, b * inv_sqrt2);
  }
  return w;
}

/// Gamma(shape, 1) draw by Marsaglia-Tsang; requires shape >= 1.
inline double gamma_draw(double shape, std::mt19937_64& gen) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = standard_normal(gen);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform01(gen);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace rtmvdr
