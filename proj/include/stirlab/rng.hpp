#pragma once

#include <cmath>
#include <cstdint>

namespace stirlab {

// Counter-based stream built on the splitmix64 finalizer. Streams are keyed
// by (seed, replica, stream-id), so replicas and per-bond clocks draw from
// independent sequences regardless of scheduling order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : state_(mix(key ^ 0x6a09e667f3bcc909ull)) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static std::uint64_t key_for(std::uint64_t seed, std::uint64_t replica,
                               std::uint64_t stream) {
    return mix(mix(mix(seed) + replica) + stream);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform on (0,1), never returns an endpoint
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_exponential(double rate) { return -std::log(next_uniform()) / rate; }

  double next_normal() {
    // Box-Muller, one value per call (the partner is discarded)
    double u1 = next_uniform();
    double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace stirlab
