// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

#include "primefam/numtheory.hpp"

namespace primefam {

/// The seven prime families, in the fixed order used by labels, heads and files.
enum class Family : std::size_t { twin = 0, sophie_germain, safe, cousin, sexy, chen, isolated };

inline constexpr std::size_t kFamilyCount = 7;

inline constexpr std::array<Family, kFamilyCount> kFamilies = {
    Family::twin, Family::sophie_germain, Family::safe,    Family::cousin,
    Family::sexy, Family::chen,           Family::isolated};

/// snake_case identifier, used for CSV columns ("y_" prefix) and reports.
std::string_view family_name(Family f) noexcept;
/// Human-readable label for markdown tables.
std::string_view family_title(Family f) noexcept;

struct FamilyLabels {
  bool twin = false;
  bool sophie_germain = false;
  bool safe = false;
  bool cousin = false;
  bool sexy = false;
  bool chen = false;
  bool isolated = false;

  bool operator[](Family f) const noexcept;
  bool& operator[](Family f) noexcept;

  friend bool operator==(const FamilyLabels&, const FamilyLabels&) = default;
};

/// Compute all seven memberships with fresh primality calls.
/// Throws OverflowError if p + 6 or 2p + 1 does not fit in 64 bits.
FamilyLabels label_prime(const numtheory::PrimeContext& ctx);

using Prevalence = std::array<double, kFamilyCount>;

/// Per-family positive fraction. Throws InvalidArgument on empty input.
Prevalence family_prevalence(std::span<const FamilyLabels> labels);

}  // namespace primefam
