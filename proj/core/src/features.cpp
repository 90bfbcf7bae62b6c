// SPDX-License-Identifier: Apache-2.0
#include "primefam/features.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <string>

#include "primefam/error.hpp"

namespace primefam {
namespace {

constexpr std::array<std::uint64_t, 4> kPrimorials = {6, 30, 210, 2310};
constexpr std::array<std::uint64_t, 12> kSmallPrimes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
constexpr std::array<std::uint64_t, 2> kExtended = {12, 60};

double residue(std::uint64_t p, std::uint64_t m) {
  return static_cast<double>(p % m) / static_cast<double>(m);
}

std::vector<std::string> schema_names(FeatureMode mode) {
  std::vector<std::string> names;
  for (auto m : kPrimorials) names.push_back("r" + std::to_string(m));
  for (auto q : kSmallPrimes) names.push_back("r" + std::to_string(q));
  if (mode == FeatureMode::causal) {
    names.emplace_back("gap_back");
  } else {
    for (const char* n : {"gap_back", "gap_fwd", "gap_ratio", "gap_total", "gap_asym"}) names.emplace_back(n);
  }
  for (const char* n : {"scale_log", "scale_bits", "scale_loglog", "digit_last", "digit_sum9", "digit_count"})
    names.emplace_back(n);
  for (auto m : kExtended) names.push_back("r" + std::to_string(m));
  return names;
}

std::vector<GroupRange> schema_groups(FeatureMode mode) {
  const std::size_t c = mode == FeatureMode::causal ? 1 : 5;
  return {{0, 4}, {4, 16}, {16, 16 + c}, {16 + c, 19 + c}, {19 + c, 22 + c}, {22 + c, 24 + c}};
}

void check_context(const numtheory::PrimeContext& ctx) {
  if (ctx.p < 3 || !numtheory::is_well_formed(ctx))
    throw InvalidArgument("features: malformed prime context for p=" + std::to_string(ctx.p));
}

// Groups D, E, F; shared by both schemas.
void append_tail(std::uint64_t p, std::vector<double>& out) {
  const double x = static_cast<double>(p);
  out.push_back(std::log(x) / 50.0);
  out.push_back(static_cast<double>(std::bit_width(p) - 1) / 64.0);
  out.push_back(std::log(std::log(x + 1.0) + 1.0) / 5.0);

  unsigned digit_sum = 0;
  unsigned digits = 0;
  for (std::uint64_t v = p; v > 0; v /= 10) {
    digit_sum += static_cast<unsigned>(v % 10);
    ++digits;
  }
  out.push_back(static_cast<double>(p % 10) / 10.0);
  out.push_back(static_cast<double>(digit_sum % 9) / 9.0);
  out.push_back(static_cast<double>(digits) / 20.0);

  for (auto m : kExtended) out.push_back(residue(p, m));
}

void append_head(std::uint64_t p, std::vector<double>& out) {
  for (auto m : kPrimorials) out.push_back(residue(p, m));
  for (auto q : kSmallPrimes) out.push_back(residue(p, q));
}

}  // namespace

std::string_view mode_name(FeatureMode mode) noexcept {
  return mode == FeatureMode::causal ? "causal" : "noncausal";
}

FeatureMode parse_mode(std::string_view text) {
  if (text == "causal") return FeatureMode::causal;
  if (text == "noncausal" || text == "non_causal" || text == "non-causal") return FeatureMode::non_causal;
  throw InvalidArgument("unknown feature mode '" + std::string(text) + "'");
}

std::size_t feature_dim(FeatureMode mode) noexcept {
  return mode == FeatureMode::causal ? kCausalDim : kNonCausalDim;
}

FeatureGroup parse_group(std::string_view text) {
  if (text.size() == 1) {
    const char c = static_cast<char>(text[0] & ~0x20);
    if (c >= 'A' && c <= 'F') return static_cast<FeatureGroup>(c - 'A');
  }
  throw InvalidArgument("unknown feature group '" + std::string(text) + "'");
}

char group_letter(FeatureGroup g) noexcept { return static_cast<char>('A' + static_cast<int>(g)); }

FeatureSchema::FeatureSchema(FeatureMode mode, std::vector<std::string> names, std::vector<GroupRange> groups)
    : mode_(mode), names_(std::move(names)), groups_(std::move(groups)) {}

const FeatureSchema& FeatureSchema::get(FeatureMode mode) {
  static const FeatureSchema causal(FeatureMode::causal, schema_names(FeatureMode::causal),
                                    schema_groups(FeatureMode::causal));
  static const FeatureSchema non_causal(FeatureMode::non_causal, schema_names(FeatureMode::non_causal),
                                        schema_groups(FeatureMode::non_causal));
  return mode == FeatureMode::causal ? causal : non_causal;
}

GroupRange FeatureSchema::group(FeatureGroup g) const {
  const auto i = static_cast<std::size_t>(g);
  if (i >= groups_.size()) throw InvalidArgument("feature group index " + std::to_string(i) + " out of range");
  return groups_[i];
}

FeatureVector causal_features(const numtheory::PrimeContext& ctx) {
  check_context(ctx);
  FeatureVector v{FeatureMode::causal, {}};
  v.values.reserve(kCausalDim);
  append_head(ctx.p, v.values);
  v.values.push_back(static_cast<double>(ctx.g_minus) / 100.0);
  append_tail(ctx.p, v.values);
  return v;
}

FeatureVector noncausal_features(const numtheory::PrimeContext& ctx) {
  check_context(ctx);
  FeatureVector v{FeatureMode::non_causal, {}};
  v.values.reserve(kNonCausalDim);
  append_head(ctx.p, v.values);
  const auto gm = static_cast<double>(ctx.g_minus);
  const auto gp = static_cast<double>(ctx.g_plus);
  v.values.push_back(gm / 100.0);
  v.values.push_back(gp / 100.0);
  v.values.push_back(gm / (gm + gp));
  v.values.push_back((gm + gp) / 100.0);
  v.values.push_back(std::abs(gm - gp) / 100.0);
  append_tail(ctx.p, v.values);
  return v;
}

FeatureVector make_features(const numtheory::PrimeContext& ctx, FeatureMode mode) {
  return mode == FeatureMode::causal ? causal_features(ctx) : noncausal_features(ctx);
}

FeatureVector zero_group(const FeatureVector& v, FeatureGroup group) {
  const GroupRange r = v.schema().group(group);
  if (v.values.size() != v.schema().dim())
    throw DimensionMismatch("zero_group: vector has " + std::to_string(v.values.size()) + " entries, schema expects " +
                            std::to_string(v.schema().dim()));
  FeatureVector out = v;
  for (std::size_t i = r.begin; i < r.end; ++i) out.values[i] = 0.0;
  return out;
}

}  // namespace primefam
