#include "oransim/rng.hpp"

#include <cmath>

namespace oransim {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t derive_seed(uint64_t master_seed, std::string_view tag) {
  // Fold the tag into the splitmix state byte by byte (FNV-1a style), then
  // advance once so adjacent tags land far apart.
  uint64_t state = master_seed ^ 0x51d2cc9908e6c4a1ULL;
  for (unsigned char c : tag) {
    state = (state ^ c) * 0x100000001b3ULL;
  }
  return splitmix64(state);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

uint64_t Rng::uniform_index(uint64_t n) {
  // Rejection to kill modulo bias; the loop almost never iterates.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::exponential() {
  double u = uniform();
  return -std::log1p(-u);
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) {
    u1 = uniform();
  }
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

uint64_t Rng::poisson(double mean) {
  if (mean <= 0.0) {
    return 0;
  }
  const double limit = std::exp(-mean);
  uint64_t k = 0;
  double prod = uniform();
  while (prod > limit) {
    ++k;
    prod *= uniform();
  }
  return k;
}

}  // namespace oransim
