#pragma once

#include <cstdint>
#include <random>

namespace manyiv {

// Deterministic RNG with keyed substreams. Every parallel unit of work
// (Monte Carlo replication, bootstrap replicate, grid point) derives its own
// stream from a parent seed and a key, so results do not depend on thread
// scheduling or worker count. Derivation is pure in (parent seed, key) and
// unaffected by draws already made from the parent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed)), engine_(state_) {}

  // 64-bit seed of the child stream; Rng(substream_seed(k)) == derive(k).
  std::uint64_t substream_seed(std::uint64_t key) const {
    return state_ ^ mix(key + 0x9e3779b97f4a7c15ULL);
  }

  Rng derive(std::uint64_t key) const { return Rng(substream_seed(key)); }

  double uniform() { return unif_(engine_); }

  double normal() { return normal_(engine_); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
    return d(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  // splitmix64 finalizer; decorrelates consecutive seeds and keys.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t state_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

}  // namespace manyiv
