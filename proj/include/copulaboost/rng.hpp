#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace cpb {

// Deterministic random stream with derivable sub-streams.
//
// All variate transforms are implemented here on top of the raw 64-bit
// engine output, so identical (seed, call sequence) gives identical doubles
// on every platform.  Sub-streams derived via derive(id) are independent of
// the parent's position, which keeps parallel work (runs, subsamples)
// reproducible regardless of scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  // independent child stream; a pure function of (seed, id)
  RngStream derive(std::uint64_t id) const;

  std::uint64_t next_u64();
  std::uint64_t uniform_int(std::uint64_t bound);  // in [0, bound)

  double uniform();      // open (0,1)
  double normal();       // standard normal (Box-Muller, cached spare)
  double exponential();  // rate 1
  double gamma(double shape);  // shape a > 0, scale 1 (Marsaglia-Tsang)

  std::vector<int> permutation(int n);
  // k of {0..n-1} without replacement, ascending
  std::vector<int> subsample(int n, int k);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cpb
