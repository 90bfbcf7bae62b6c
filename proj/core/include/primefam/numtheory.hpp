// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace primefam::numtheory {

/// Largest prime representable in 64 bits (2^64 - 59).
inline constexpr std::uint64_t kLargestPrime64 = 18446744073709551557ULL;

/// Upper bound of the trial-division table used before Pollard rho.
inline constexpr std::uint64_t kTrialDivisionLimit = 100000;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) noexcept;
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) noexcept;

/// Deterministic Miller-Rabin with the first twelve primes as witnesses.
/// Exact for every 64-bit input.
bool is_prime(std::uint64_t n) noexcept;

/// True iff n has exactly two prime factors counted with multiplicity.
/// Primes, 0 and 1 return false.
bool is_semiprime(std::uint64_t n);

/// Largest prime < n. Throws InvalidArgument for n <= 2.
std::uint64_t prev_prime(std::uint64_t n);

/// Smallest prime > n. Throws OverflowError past the largest 64-bit prime.
std::uint64_t next_prime(std::uint64_t n);

/// Some prime factor of a composite n (trial division, then Brent's rho).
/// Throws InvalidArgument when n < 4 or n is prime.
std::uint64_t factor_smallest(std::uint64_t n);

/// A prime together with its neighbouring primes and the two gaps.
struct PrimeContext {
  std::uint64_t p = 0;
  std::uint64_t p_prev = 0;
  std::uint64_t p_next = 0;
  std::uint64_t g_minus = 0;
  std::uint64_t g_plus = 0;

  friend bool operator==(const PrimeContext&, const PrimeContext&) = default;
};

/// Build the context of prime p (p >= 3). Throws InvalidArgument if p is not prime.
PrimeContext make_context(std::uint64_t p);

/// Cheap structural check: ordering and gap consistency, no primality calls.
bool is_well_formed(const PrimeContext& ctx) noexcept;

}  // namespace primefam::numtheory
