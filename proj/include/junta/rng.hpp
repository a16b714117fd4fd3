#pragma once

// Counter-based randomness. Every random bit used by the samplers is a pure
// function of (seed, stream tag, counter), so tables can be filled in any
// order and still come out bit-identical.

#include "junta/rational.hpp"

#include <cstdint>
#include <stdexcept>

namespace junta {

struct Seed {
  std::uint64_t value = 0;
};

/// Stream tags keep independent uses of one seed apart.
enum class Stream : std::uint64_t {
  kBernoulliRegion = 1,
  kUniformRegion = 2,
  kSubsetChoice = 3,
  kColorBits = 4,
  kPointSample = 5,
  kTrialYes = 6,
  kTrialNo = 7,
  kTesterPoints = 8,
  kNoise = 9,
  kAux = 10,
};

namespace detail {

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Keyed SplitMix64: word(counter) = mix(mix(seed ^ tag) + golden * (counter + 1)).
class CounterRng {
 public:
  constexpr CounterRng(Seed seed, Stream tag)
      : key_(detail::splitmix_finalize(seed.value ^
                                       (static_cast<std::uint64_t>(tag) * 0xd1b54a32d192ed03ULL))) {}

  constexpr std::uint64_t word(std::uint64_t counter) const {
    return detail::splitmix_finalize(key_ + 0x9e3779b97f4a7c15ULL * (counter + 1));
  }

  constexpr bool bit(std::uint64_t counter) const { return (word(counter) >> 63) != 0; }

  /// Derived seed for a sub-experiment (one trial, one sample, ...).
  constexpr Seed derive(std::uint64_t counter) const { return Seed{word(counter)}; }

 private:
  std::uint64_t key_;
};

/// Sequential view of one counter stream.
class RngStream {
 public:
  RngStream(Seed seed, Stream tag) : rng_(seed, tag) {}

  std::uint64_t next() { return rng_.word(counter_++); }

  /// Uniform in [0, bound), Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("below: zero bound");
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = -bound % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Fresh seed for an independent sub-stream.
  Seed split() { return Seed{next()}; }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

/// floor(p * 2^64) for p in [0, 1); a Bernoulli(p) draw is `word < threshold`.
inline std::uint64_t bernoulli_threshold(const Rational& p) {
  if (p < 0 || p >= 1) throw std::invalid_argument("bernoulli_threshold: p outside [0, 1)");
  Integer scaled = p.get_num() * pow2(64);
  Integer t;
  mpz_fdiv_q(t.get_mpz_t(), scaled.get_mpz_t(), p.get_den_mpz_t());
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, t.get_mpz_t());
  return out;
}

}  // namespace junta
