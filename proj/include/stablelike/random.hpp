#pragma once

#include <cstdint>
#include <random>

namespace stablelike {

// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t mix64(std::uint64_t x);

// Child seed for (master, index); independent of scheduling order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Explicit, value-semantics random stream.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0);

  // Child stream number `index` of this stream's seed; does not advance *this.
  RandomStream split(std::uint64_t index) const;

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on the open interval (0,1).
  double uniform();
  // Standard exponential.
  double exponential();
  // Standard normal (Box–Muller, no cached pair, so the stream stays a pure counter of draws).
  double normal();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace stablelike
