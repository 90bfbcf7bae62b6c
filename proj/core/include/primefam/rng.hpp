// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>

namespace primefam {

/// SplitMix64 output finalizer (Steele, Lea & Flood). Bijective on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Named purposes that randomness is drawn for. Each gets an independent key.
enum class Stream : std::uint64_t {
  dataset = 0x6461746173657431ULL,  // "dataset1"
  init = 0x696e697477656967ULL,     // "initweig"
  dropout = 0x64726f706f757431ULL,  // "dropout1"
  shuffle = 0x73687566666c6531ULL,  // "shuffle1"
};

/*
 * Counter-based generator: the i-th output of a stream is
 *
 *   mix64(key + (i + 1) * 0x9e3779b97f4a7c15)
 *
 * i.e. the SplitMix64 sequence started at `key`, but addressable by index so
 * that any element can be produced without generating its predecessors. Keys
 * are derived by folding (seed, stream, path...) through mix64, which makes
 * substreams (one per anchor, epoch, layer, ...) independent of draw order
 * and thread count.
 */
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  /// Derive the key for `seed` / `stream` / `path...`.
  static constexpr CounterRng derive(std::uint64_t seed, Stream stream,
                                     std::initializer_list<std::uint64_t> path = {}) noexcept {
    std::uint64_t k = mix64(seed ^ static_cast<std::uint64_t>(stream));
    for (std::uint64_t p : path) k = mix64(k ^ mix64(p + kGolden));
    return CounterRng(k);
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t position() const noexcept { return counter_; }

  /// Random access: the raw 64-bit output at index `i`.
  constexpr std::uint64_t at(std::uint64_t i) const noexcept {
    return mix64(key_ + (i + 1) * kGolden);
  }

  /// Sequential access; advances the internal counter.
  constexpr std::uint64_t next() noexcept { return at(counter_++); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return to_unit(next()); }

  static constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
  /// `bound` must be nonzero.
  std::uint64_t below(std::uint64_t bound) noexcept {
    __extension__ using u128 = unsigned __int128;
    u128 m = static_cast<u128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<u128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace primefam
