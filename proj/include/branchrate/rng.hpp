#pragma once

#include <cstdint>

namespace branchrate {

// Counter-based generator (SplitMix64). Streams for independent trials are
// derived as seed ^ mix(trial_index), so a (seed, trial) pair always maps to
// the same sequence regardless of execution order.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1) with 53 random bits
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n)
  uint64_t below(uint64_t n) { return next() % n; }

  static uint64_t mix(uint64_t x) {
    SplitMix64 g(x);
    return g.next();
  }

  static SplitMix64 for_trial(uint64_t seed, uint64_t trial) {
    return SplitMix64(seed ^ mix(trial + 1));
  }

 private:
  uint64_t state_;
};

}  // namespace branchrate
