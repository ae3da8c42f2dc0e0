#ifndef HPLAB_RNG_HPP
#define HPLAB_RNG_HPP

#include <cstdint>
#include <random>

#include "hplab/core.hpp"

namespace hplab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// A reproducible random stream identified by (seed, stream_id).
///
/// Streams with the same identity produce the same draws; distinct stream ids
/// seed the engine from unrelated splitmix64 outputs. `substream(i)` derives a
/// child identity, which is how parallel loops give each work item its own
/// stream independent of the worker count.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
    const std::uint64_t a = splitmix64(seed);
    const std::uint64_t b = splitmix64(stream_id ^ 0x6a09e667f3bcc909ULL);
    const std::uint64_t c = splitmix64(a ^ splitmix64(b));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  RngStream substream(std::uint64_t index) const {
    return RngStream(seed_, splitmix64(stream_id_ * 0x9e3779b97f4a7c15ULL + splitmix64(index + 1)));
  }

  std::mt19937_64& engine() { return engine_; }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal(double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(engine_); }
  double gamma(double shape) { return std::gamma_distribution<double>(shape, 1.0)(engine_); }
  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
  }

  /// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
  Complex complex_normal() {
    const double sd = std::sqrt(0.5);
    const double re = normal(sd);
    const double im = normal(sd);
    return {re, im};
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace hplab

#endif  // HPLAB_RNG_HPP
