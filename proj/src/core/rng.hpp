#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace snspd {

// Deterministic random source with an explicit 64-bit seed. Distribution
// transforms are implemented here (not via std:: distributions) so a given
// seed produces the same stream on every standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, 1); never exactly 0, safe to pass through log().
  double uniform_positive() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

  double exponential(double rate) {
    return -std::log(uniform_positive()) / rate;
  }

  // Box-Muller; the spare draw is cached.
  double gaussian(double mean, double sigma) {
    if (have_spare_) {
      have_spare_ = false;
      return mean + sigma * spare_;
    }
    double u1 = uniform_positive();
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return mean + sigma * radius * std::cos(angle);
  }

  // Exact Poisson count via the exponential race; O(mean) draws.
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    std::uint64_t count = 0;
    double acc = exponential(1.0);
    while (acc < mean) {
      ++count;
      acc += exponential(1.0);
    }
    return count;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // splitmix64 step; used to derive independent per-trial seeds.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace snspd
