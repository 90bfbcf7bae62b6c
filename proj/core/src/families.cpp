// SPDX-License-Identifier: Apache-2.0
#include "primefam/families.hpp"

#include <limits>
#include <string>

#include "primefam/error.hpp"

namespace primefam {

using numtheory::is_prime;

std::string_view family_name(Family f) noexcept {
  switch (f) {
    case Family::twin: return "twin";
    case Family::sophie_germain: return "sophie_germain";
    case Family::safe: return "safe";
    case Family::cousin: return "cousin";
    case Family::sexy: return "sexy";
    case Family::chen: return "chen";
    case Family::isolated: return "isolated";
  }
  return "?";
}

std::string_view family_title(Family f) noexcept {
  switch (f) {
    case Family::twin: return "Twin";
    case Family::sophie_germain: return "Sophie Germain";
    case Family::safe: return "Safe";
    case Family::cousin: return "Cousin";
    case Family::sexy: return "Sexy";
    case Family::chen: return "Chen";
    case Family::isolated: return "Isolated";
  }
  return "?";
}

bool FamilyLabels::operator[](Family f) const noexcept {
  switch (f) {
    case Family::twin: return twin;
    case Family::sophie_germain: return sophie_germain;
    case Family::safe: return safe;
    case Family::cousin: return cousin;
    case Family::sexy: return sexy;
    case Family::chen: return chen;
    case Family::isolated: break;
  }
  return isolated;
}

bool& FamilyLabels::operator[](Family f) noexcept {
  switch (f) {
    case Family::twin: return twin;
    case Family::sophie_germain: return sophie_germain;
    case Family::safe: return safe;
    case Family::cousin: return cousin;
    case Family::sexy: return sexy;
    case Family::chen: return chen;
    case Family::isolated: break;
  }
  return isolated;
}

FamilyLabels label_prime(const numtheory::PrimeContext& ctx) {
  const std::uint64_t p = ctx.p;
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  if (p > (kMax - 1) / 2)
    throw OverflowError("label_prime: 2p+1 overflows for p=" + std::to_string(p));

  auto prime_at = [p](int offset) {
    if (offset < 0) {
      const auto back = static_cast<std::uint64_t>(-offset);
      return p > back && is_prime(p - back);
    }
    return is_prime(p + static_cast<std::uint64_t>(offset));
  };

  FamilyLabels y;
  const bool forward_twin = prime_at(2);
  y.twin = forward_twin || prime_at(-2);
  y.cousin = prime_at(4) || prime_at(-4);
  y.sexy = prime_at(6) || prime_at(-6);
  y.sophie_germain = is_prime(2 * p + 1);
  y.safe = (p & 1) == 1 && is_prime((p - 1) / 2);
  y.chen = forward_twin || numtheory::is_semiprime(p + 2);
  y.isolated = !y.twin;
  return y;
}

Prevalence family_prevalence(std::span<const FamilyLabels> labels) {
  if (labels.empty()) throw InvalidArgument("family_prevalence: empty label sequence");
  std::array<std::size_t, kFamilyCount> positives{};
  for (const FamilyLabels& y : labels)
    for (Family f : kFamilies) positives[static_cast<std::size_t>(f)] += y[f] ? 1 : 0;
  Prevalence out{};
  const auto n = static_cast<double>(labels.size());
  for (std::size_t k = 0; k < kFamilyCount; ++k) out[k] = static_cast<double>(positives[k]) / n;
  // Twin and isolated counts sum to n, but their quotients can round apart.
  const auto iso = static_cast<std::size_t>(Family::isolated);
  out[iso] = 1.0 - out[static_cast<std::size_t>(Family::twin)];
  return out;
}

}  // namespace primefam
