// SPDX-License-Identifier: Apache-2.0
#include "primefam/numtheory.hpp"

#include <array>
#include <numeric>
#include <string>
#include <vector>

#include "primefam/error.hpp"
#include "primefam/rng.hpp"

namespace primefam::numtheory {
namespace {

__extension__ using u128 = unsigned __int128;

constexpr std::array<std::uint64_t, 12> kWitnesses = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    std::vector<bool> composite(kTrialDivisionLimit + 1, false);
    std::vector<std::uint32_t> out;
    for (std::uint64_t i = 2; i <= kTrialDivisionLimit; ++i) {
      if (composite[i]) continue;
      out.push_back(static_cast<std::uint32_t>(i));
      for (std::uint64_t j = i * i; j <= kTrialDivisionLimit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

bool miller_rabin_round(std::uint64_t n, std::uint64_t d, int s, std::uint64_t a) noexcept {
  a %= n;
  if (a == 0) return true;
  std::uint64_t x = pow_mod(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int r = 1; r < s; ++r) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

// Brent's variant of Pollard rho with batched gcds. Returns a nontrivial
// divisor of the odd composite n; the polynomial constant is derived from n
// so the result is reproducible.
std::uint64_t brent_rho(std::uint64_t n) {
  constexpr std::uint64_t kBatch = 128;
  std::uint64_t salt = 0;
  while (true) {
    const std::uint64_t c = 1 + mix64(n ^ (salt * CounterRng::kGolden)) % (n - 1);
    const std::uint64_t x0 = mix64(n + salt) % n;
    auto f = [&](std::uint64_t x) {
      std::uint64_t v = mul_mod(x, x, n) + c;
      return v >= n || v < c ? v - n : v;
    };
    std::uint64_t y = x0, x = x0, ys = x0, q = 1, g = 1;
    for (std::uint64_t r = 1; g == 1; r <<= 1) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      for (std::uint64_t k = 0; k < r && g == 1; k += kBatch) {
        ys = y;
        const std::uint64_t lim = std::min(kBatch, r - k);
        for (std::uint64_t i = 0; i < lim; ++i) {
          y = f(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
      }
    }
    if (g == n) {
      // Batch overshot; replay one step at a time from the saved point.
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
    ++salt;
  }
}

}  // namespace

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) noexcept {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) noexcept {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  for (std::uint64_t p : kWitnesses) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n < 41 * 41) return true;
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : kWitnesses)
    if (!miller_rabin_round(n, d, s, a)) return false;
  return true;
}

std::uint64_t factor_smallest(std::uint64_t n) {
  if (n < 4 || is_prime(n))
    throw InvalidArgument("factor_smallest: " + std::to_string(n) + " is not composite");
  for (std::uint32_t p : small_primes()) {
    if (static_cast<std::uint64_t>(p) * p > n) break;
    if (n % p == 0) return p;
  }
  std::uint64_t f = n;
  while (!is_prime(f)) f = brent_rho(f);
  return f;
}

bool is_semiprime(std::uint64_t n) {
  if (n < 4 || is_prime(n)) return false;
  for (std::uint32_t p : small_primes()) {
    if (static_cast<std::uint64_t>(p) * p > n) break;
    if (n % p == 0) return is_prime(n / p);
  }
  // Every prime factor exceeds the trial bound, so below its cube there is
  // no room for a third factor.
  constexpr u128 kCube = static_cast<u128>(kTrialDivisionLimit) * kTrialDivisionLimit * kTrialDivisionLimit;
  if (static_cast<u128>(n) < kCube) return true;
  const std::uint64_t f = factor_smallest(n);
  return is_prime(n / f);
}

std::uint64_t prev_prime(std::uint64_t n) {
  if (n <= 2) throw InvalidArgument("prev_prime: no prime below " + std::to_string(n));
  if (n == 3) return 2;
  std::uint64_t c = (n - 1) | 1;  // largest odd candidate < n
  if (c >= n) c -= 2;
  while (!is_prime(c)) c -= 2;
  return c;
}

std::uint64_t next_prime(std::uint64_t n) {
  if (n < 2) return 2;
  if (n >= kLargestPrime64)
    throw OverflowError("next_prime: no 64-bit prime above " + std::to_string(n));
  std::uint64_t c = (n + 1) | 1;
  while (!is_prime(c)) c += 2;
  return c;
}

PrimeContext make_context(std::uint64_t p) {
  if (p < 3 || !is_prime(p))
    throw InvalidArgument("make_context: " + std::to_string(p) + " is not a prime >= 3");
  PrimeContext ctx;
  ctx.p = p;
  ctx.p_prev = prev_prime(p);
  ctx.p_next = next_prime(p);
  ctx.g_minus = p - ctx.p_prev;
  ctx.g_plus = ctx.p_next - p;
  return ctx;
}

bool is_well_formed(const PrimeContext& ctx) noexcept {
  return ctx.p_prev < ctx.p && ctx.p < ctx.p_next && ctx.g_minus == ctx.p - ctx.p_prev &&
         ctx.g_plus == ctx.p_next - ctx.p;
}

}  // namespace primefam::numtheory
