// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "primefam/numtheory.hpp"

namespace primefam {

enum class FeatureMode { causal, non_causal };

/// Feature groups in schema order.
///   A primorial residues, B small-prime residues, C gap(s), D scale,
///   E decimal digits, F extended modular residues.
enum class FeatureGroup { A = 0, B, C, D, E, F };

inline constexpr std::size_t kCausalDim = 25;
inline constexpr std::size_t kNonCausalDim = 29;

std::string_view mode_name(FeatureMode mode) noexcept;
/// Accepts "causal", "noncausal" and "non_causal". Throws InvalidArgument otherwise.
FeatureMode parse_mode(std::string_view text);
std::size_t feature_dim(FeatureMode mode) noexcept;

/// Accepts a single letter A-F (case-insensitive).
FeatureGroup parse_group(std::string_view text);
char group_letter(FeatureGroup g) noexcept;

struct GroupRange {
  std::size_t begin;
  std::size_t end;  // exclusive
};

class FeatureSchema {
 public:
  static const FeatureSchema& get(FeatureMode mode);

  FeatureMode mode() const noexcept { return mode_; }
  std::size_t dim() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  /// Index range of a group. Throws InvalidArgument for an out-of-range enum value.
  GroupRange group(FeatureGroup g) const;

 private:
  FeatureSchema(FeatureMode mode, std::vector<std::string> names, std::vector<GroupRange> groups);

  FeatureMode mode_;
  std::vector<std::string> names_;
  std::vector<GroupRange> groups_;
};

struct FeatureVector {
  FeatureMode mode = FeatureMode::causal;
  std::vector<double> values;

  const FeatureSchema& schema() const { return FeatureSchema::get(mode); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// 25 features computable from p and p_prev only; p_next is never read.
FeatureVector causal_features(const numtheory::PrimeContext& ctx);

/// 29 features: the backward-gap entry is replaced by a five-entry gap block
/// that also sees g_plus.
FeatureVector noncausal_features(const numtheory::PrimeContext& ctx);

FeatureVector make_features(const numtheory::PrimeContext& ctx, FeatureMode mode);

/// Copy of `v` with every entry of `group` set to zero.
FeatureVector zero_group(const FeatureVector& v, FeatureGroup group);

}  // namespace primefam
