#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace oransim {

// splitmix64 step, used to derive independent stream seeds from a master seed.
uint64_t splitmix64(uint64_t& state);

// Mixes a master seed with a stream tag (e.g. "channel", "arrivals") so each
// consumer gets its own decorrelated engine. Same (seed, tag) -> same stream.
uint64_t derive_seed(uint64_t master_seed, std::string_view tag);

// Thin wrapper over mt19937_64 with hand-rolled samplers. libstdc++'s
// distribution objects are not pinned by the standard, so replay files and
// rerun determinism rely on these fixed implementations instead.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Uniform on [lo, hi).
  double uniform(double lo, double hi);

  // Uniform integer in [0, n), n > 0.
  uint64_t uniform_index(uint64_t n);

  // Unit-mean exponential (inverse CDF).
  double exponential();

  // Standard normal (Box-Muller, no caching so the stream stays positional).
  double normal();

  // Poisson with the given mean (Knuth product method; fine for mean < ~500).
  uint64_t poisson(double mean);

  uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace oransim
