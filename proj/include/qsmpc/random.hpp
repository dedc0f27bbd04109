#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <vector>

namespace qsmpc {

/// Seeded random source with portable bounded draws.
///
/// std::uniform_int_distribution and friends are implementation-defined, so
/// the bounded helpers here are written out by hand; together with the
/// standardized mt19937_64 and seed_seq this keeps every sampled value
/// identical across standard libraries for a fixed seed.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Independent stream for `path` under `master`. Equal inputs give equal
  /// streams; any difference in the path gives an unrelated stream.
  static Rng derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::vector<std::uint32_t> words;
    words.reserve(2 * (path.size() + 1));
    auto push = [&words](std::uint64_t v) {
      words.push_back(static_cast<std::uint32_t>(v));
      words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(master);
    for (auto p : path) push(p);
    // Hash the path down to one 64-bit seed; seeding the engine from a full
    // seed_seq costs far more than the handful of draws a stream needs.
    std::seed_seq seq(words.begin(), words.end());
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return Rng((std::uint64_t{out[1]} << 32) | out[0]);
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    // Reject the tail of the 64-bit range that would bias the modulo.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % bound;
  }

  std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qsmpc
