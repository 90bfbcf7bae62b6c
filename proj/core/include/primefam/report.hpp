// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "primefam/evaluator.hpp"
#include "primefam/table.hpp"

namespace primefam {

/// Constructed versus reference parameter count, rendered as a note in report.md.
struct ParamCountNote {
  std::size_t counted = 0;
  std::size_t reference = 1'254'853;
  std::optional<std::size_t> shallow_counted;
  std::size_t shallow_reference = 1'989;

  double relative_diff() const noexcept;
};

/// Everything a report can contain; absent sections produce no CSV and no
/// markdown table.
struct ReportBundle {
  std::string title = "Prime family classification report";
  std::optional<std::vector<DensityRow>> density;
  std::optional<HlFit> hl;
  std::optional<std::vector<ScaleEval>> recall_by_scale;
  std::optional<AblationTable> ablation;
  std::optional<std::vector<GapRow>> gap;
  std::optional<std::vector<ModelComparison>> comparison;
  std::optional<std::vector<SeedSummary>> seeds;
  std::optional<ParamCountNote> params;
  std::vector<std::string> notes;
};

Table density_csv(const std::vector<DensityRow>& rows, const std::optional<HlFit>& hl);
Table recall_by_scale_csv(const std::vector<ScaleEval>& evals);
Table ablation_csv(const AblationTable& t);
Table loss_comparison_csv(const std::vector<ModelComparison>& cmp);
Table seed_robustness_csv(const std::vector<SeedSummary>& seeds);
Table causality_gap_csv(const std::vector<GapRow>& rows);

std::string render_markdown(const ReportBundle& bundle);

/// Write the CSVs for every present section plus report.md into `dir`
/// (created if missing). Returns the written paths in a fixed order.
std::vector<std::filesystem::path> emit_report(const ReportBundle& bundle, const std::filesystem::path& dir);

}  // namespace primefam
