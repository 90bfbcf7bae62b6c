// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "primefam/families.hpp"
#include "primefam/numtheory.hpp"

namespace primefam {

enum class SampleMode { single_scale, train_mix };

/// Anchors used by SampleMode::train_mix; the count is split in equal thirds.
inline constexpr std::array<std::uint64_t, 3> kTrainAnchors = {10'000'000ULL, 100'000'000ULL, 1'000'000'000ULL};

struct SampleSpec {
  std::uint64_t anchor = 0;  // ignored for train_mix (kTrainAnchors are used)
  std::size_t count = 0;
  std::uint64_t window = 0;  // 0 selects default_window(anchor)
  std::uint64_t seed = 0;
  SampleMode mode = SampleMode::single_scale;
  std::string tag = "sample";  // written to the split column

  friend bool operator==(const SampleSpec&, const SampleSpec&) = default;
};

/// 10^7 for anchors up to 10^9, 10^9 above.
std::uint64_t default_window(std::uint64_t anchor) noexcept;

struct DataRow {
  numtheory::PrimeContext ctx;
  FamilyLabels labels;
  std::string split;

  friend bool operator==(const DataRow&, const DataRow&) = default;
};

struct DataSet {
  std::vector<DataRow> rows;  // ascending, distinct p
  SampleSpec spec;
  Prevalence prevalence{};

  std::size_t size() const noexcept { return rows.size(); }
  std::vector<FamilyLabels> labels() const;
  /// Recompute `prevalence` from the rows.
  void refresh_prevalence();

  friend bool operator==(const DataSet&, const DataSet&) = default;
};

/// Draw `count` distinct primes uniformly from [anchor, anchor + window]:
/// uniform integers from the dataset stream are kept when they are prime and
/// not yet seen. Mapping draws to the next prime instead would weight each
/// prime by its backward gap and under-sample twins. Throws InvalidArgument if the window is too small for the
/// count or the draw budget runs out.
DataSet sample_primes(const SampleSpec& spec, unsigned threads = 1);

/// Named splits: train (200k mixed), val (20k at 5e8), ood10/ood12/ood14/ood16.
std::map<std::string, DataSet> standard_suite(std::uint64_t seed, unsigned threads = 1);

/// Spec of each split in standard_suite, in canonical order.
std::vector<SampleSpec> standard_suite_specs(std::uint64_t seed);

inline constexpr const char* kDatasetVersionLine = "# prime-sieve-dataset v1";

void save_csv(const DataSet& ds, const std::filesystem::path& path);
DataSet load_csv(const std::filesystem::path& path);

}  // namespace primefam
