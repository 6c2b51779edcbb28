#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace fscre {

// Seeded pseudo-random source. Every draw is produced by code in this class
// from a mt19937_64 stream, so equal seeds give bitwise-equal sequences on
// every platform. Single owner; parallel work uses child().
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  // Independent source for worker/stream `index`.
  RandomSource child(std::uint64_t index) const;

  std::uint64_t next_u64() { return engine_(); }
  double uniform();  // [0, 1)
  double uniform(double low, double high);
  double normal();  // standard normal, Box-Muller
  bool bernoulli(double p) { return uniform() < p; }
  std::size_t index(std::size_t n);  // uniform on {0, ..., n-1}

  std::vector<std::size_t> permutation(std::size_t n);
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace fscre
