// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "primefam/dataset.hpp"
#include "primefam/features.hpp"
#include "primefam/network.hpp"

namespace primefam {

struct EvalConfig {
  double threshold = 0.50;  // a prediction is positive iff yhat >= threshold
  unsigned threads = 1;

  void validate() const;
};

/// Count and ranking metrics of one family on one dataset. Ratios whose
/// denominator is zero are nullopt, never 0.
struct FamilyMetrics {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::optional<double> recall;
  std::optional<double> precision;
  std::optional<double> f1;
  std::optional<double> auc_pr;
  double brier = 0.0;
  double search_reduction = 0.0;  // 1 - predicted positives / rows
  double prevalence = 0.0;
};

struct ScaleEval {
  std::string scale;  // dataset tag, e.g. "val" or "ood16"
  std::uint64_t anchor = 0;
  std::size_t rows = 0;
  std::array<FamilyMetrics, kFamilyCount> families{};
};

/// Step-wise average precision: sum over distinct score thresholds of
/// (R_i - R_{i-1}) * P_i. nullopt when there are no positives.
std::optional<double> average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels);

FamilyMetrics family_metrics(std::span<const double> scores, std::span<const std::uint8_t> labels, double threshold);

/// Metrics from precomputed N x 7 predictions.
ScaleEval evaluate_predictions(const nn::Matrix<float>& predictions, const DataSet& ds, const EvalConfig& cfg);

/// Predict with dropout off and score every family. `zeroed` blanks one
/// feature group first. Throws DimensionMismatch if params do not take the
/// mode's feature dimension.
ScaleEval evaluate(const nn::NetworkParams<float>& params, const DataSet& ds, const EvalConfig& cfg, FeatureMode mode,
                   std::optional<FeatureGroup> zeroed = std::nullopt);

/// Feature mode implied by a network's input dimension.
FeatureMode mode_for(const nn::NetworkParams<float>& params);

// ---------------------------------------------------------------- density

struct DensityRow {
  std::string scale;
  std::uint64_t anchor = 0;
  std::size_t rows = 0;
  double twin_fraction = 0.0;
  double isolated_fraction = 0.0;
  Prevalence prevalence{};
};

/// One row per dataset. Throws InvalidArgument for no datasets or an empty one.
std::vector<DensityRow> density_table(std::span<const DataSet* const> datasets);

struct HlFit {
  double c = 0.0;            // twin fraction ~ c / ln N, calibrated at the smallest scale
  double implied_c2 = 0.0;   // c / 2: the twin constant in the 2*C2 convention (~1.32)
  double r2 = 0.0;
  std::vector<double> predicted;  // c / ln N per row
};

/// Throws DegenerateInput with fewer than two scales.
HlFit hl_fit(std::span<const DensityRow> rows);

/// Coefficient of determination of the least-squares line y ~ a + b x.
/// Throws DegenerateInput for fewer than two points or constant x.
double linear_r2(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------- experiments

struct AblationTable {
  std::array<std::optional<double>, kFamilyCount> full_recall{};
  /// drop[g][k] = full recall - recall with group g zeroed.
  std::array<std::array<std::optional<double>, kFamilyCount>, 6> drop{};
};

/// Leave-one-group-out on a causal model. Throws DimensionMismatch for a non-causal model.
AblationTable ablation(const nn::NetworkParams<float>& params, const DataSet& val, const EvalConfig& cfg);

struct GapRow {
  std::string scale;
  std::uint64_t anchor = 0;
  std::array<std::optional<double>, kFamilyCount> causal_recall{};
  std::array<std::optional<double>, kFamilyCount> noncausal_recall{};
  std::array<std::optional<double>, kFamilyCount> delta{};  // causal - noncausal
};

std::vector<GapRow> causality_gap(const nn::NetworkParams<float>& causal, const nn::NetworkParams<float>& noncausal,
                                  std::span<const DataSet* const> datasets, const EvalConfig& cfg);

struct ModelComparison {
  std::string scale;
  std::vector<std::string> models;
  std::vector<ScaleEval> results;  // parallel to models
};

ModelComparison compare_models(std::span<const std::pair<std::string, const nn::NetworkParams<float>*>> models,
                               const DataSet& ds, const EvalConfig& cfg);

struct MeanSd {
  std::optional<double> mean;
  std::optional<double> sd;  // sample standard deviation (n - 1)
};

struct SeedSummary {
  std::string scale;
  std::size_t seeds = 0;
  std::array<MeanSd, kFamilyCount> recall{};
  std::array<MeanSd, kFamilyCount> f1{};
  std::array<MeanSd, kFamilyCount> auc_pr{};
};

MeanSd mean_sd(std::span<const std::optional<double>> values);

/// Summarise the same scale evaluated under several seeds.
SeedSummary seed_summary(std::span<const ScaleEval> per_seed);

}  // namespace primefam
