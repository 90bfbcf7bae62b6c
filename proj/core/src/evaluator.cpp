// SPDX-License-Identifier: Apache-2.0
#include "primefam/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "primefam/error.hpp"
#include "primefam/tensors.hpp"

namespace primefam {

void EvalConfig::validate() const {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("EvalConfig: threshold must lie in (0, 1)");
}

std::optional<double> average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw DimensionMismatch("average_precision: scores/labels size mismatch");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
  if (positives == 0) return std::nullopt;

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double ap = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    // Consume every row tied at this score: one threshold, one PR point.
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      tp += labels[order[i]];
      ++seen;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

FamilyMetrics family_metrics(std::span<const double> scores, std::span<const std::uint8_t> labels, double threshold) {
  if (scores.size() != labels.size()) throw DimensionMismatch("family_metrics: scores/labels size mismatch");
  if (scores.empty()) throw InvalidArgument("family_metrics: empty slice");
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("family_metrics: threshold must lie in (0, 1)");
  FamilyMetrics m;
  double brier = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] != 0;
    if (predicted && actual) ++m.tp;
    else if (predicted) ++m.fp;
    else if (actual) ++m.fn;
    else ++m.tn;
    const double e = scores[i] - (actual ? 1.0 : 0.0);
    brier += e * e;
  }
  const auto n = static_cast<double>(scores.size());
  m.brier = brier / n;
  m.prevalence = static_cast<double>(m.tp + m.fn) / n;
  m.search_reduction = 1.0 - static_cast<double>(m.tp + m.fp) / n;
  if (m.tp + m.fn > 0) m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  if (m.tp + m.fp > 0) m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  if (m.recall && m.precision) {
    const double s = *m.precision + *m.recall;
    m.f1 = s > 0.0 ? 2.0 * *m.precision * *m.recall / s : 0.0;
  }
  m.auc_pr = average_precision(scores, labels);
  return m;
}

ScaleEval evaluate_predictions(const nn::Matrix<float>& predictions, const DataSet& ds, const EvalConfig& cfg) {
  cfg.validate();
  if (ds.rows.empty()) throw InvalidArgument("evaluate: empty dataset");
  if (predictions.rows() != static_cast<Eigen::Index>(ds.rows.size()) ||
      predictions.cols() != static_cast<Eigen::Index>(kFamilyCount))
    throw DimensionMismatch("evaluate: prediction matrix does not match dataset");
  ScaleEval out;
  out.scale = ds.spec.tag;
  out.anchor = ds.spec.anchor;
  out.rows = ds.rows.size();
  std::vector<double> scores(ds.rows.size());
  std::vector<std::uint8_t> labels(ds.rows.size());
  for (std::size_t k = 0; k < kFamilyCount; ++k) {
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
      scores[i] = static_cast<double>(predictions(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
      labels[i] = ds.rows[i].labels[kFamilies[k]] ? 1 : 0;
    }
    out.families[k] = family_metrics(scores, labels, cfg.threshold);
  }
  return out;
}

FeatureMode mode_for(const nn::NetworkParams<float>& params) {
  if (params.arch.input_dim == static_cast<int>(kCausalDim)) return FeatureMode::causal;
  if (params.arch.input_dim == static_cast<int>(kNonCausalDim)) return FeatureMode::non_causal;
  throw DimensionMismatch("network input dimension " + std::to_string(params.arch.input_dim) +
                          " matches no feature schema");
}

ScaleEval evaluate(const nn::NetworkParams<float>& params, const DataSet& ds, const EvalConfig& cfg, FeatureMode mode,
                   std::optional<FeatureGroup> zeroed) {
  if (params.arch.input_dim != static_cast<int>(feature_dim(mode)))
    throw DimensionMismatch("evaluate: model takes d=" + std::to_string(params.arch.input_dim) + ", " +
                            std::string(mode_name(mode)) + " features have d=" + std::to_string(feature_dim(mode)));
  const auto x = feature_matrix<float>(ds, mode, zeroed, cfg.threads);
  return evaluate_predictions(nn::predict(params, x), ds, cfg);
}

std::vector<DensityRow> density_table(std::span<const DataSet* const> datasets) {
  if (datasets.empty()) throw InvalidArgument("density_table: no datasets");
  std::vector<DensityRow> out;
  for (const DataSet* ds : datasets) {
    if (ds == nullptr || ds->rows.empty()) throw InvalidArgument("density_table: empty dataset");
    DensityRow r;
    r.scale = ds->spec.tag;
    r.anchor = ds->spec.anchor;
    r.rows = ds->rows.size();
    const auto labels = ds->labels();
    r.prevalence = family_prevalence(labels);
    r.twin_fraction = r.prevalence[static_cast<std::size_t>(Family::twin)];
    r.isolated_fraction = r.prevalence[static_cast<std::size_t>(Family::isolated)];
    out.push_back(std::move(r));
  }
  return out;
}

HlFit hl_fit(std::span<const DensityRow> rows) {
  if (rows.size() < 2) throw DegenerateInput("hl_fit: need at least two scales");
  const auto smallest = std::min_element(rows.begin(), rows.end(),
                                         [](const DensityRow& a, const DensityRow& b) { return a.anchor < b.anchor; });
  if (smallest->anchor < 3) throw DegenerateInput("hl_fit: anchors must exceed e");
  HlFit fit;
  fit.c = smallest->twin_fraction * std::log(static_cast<double>(smallest->anchor));
  fit.implied_c2 = fit.c / 2.0;
  double mean = 0.0;
  for (const auto& r : rows) mean += r.twin_fraction;
  mean /= static_cast<double>(rows.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& r : rows) {
    const double pred = fit.c / std::log(static_cast<double>(r.anchor));
    fit.predicted.push_back(pred);
    ss_res += (r.twin_fraction - pred) * (r.twin_fraction - pred);
    ss_tot += (r.twin_fraction - mean) * (r.twin_fraction - mean);
  }
  if (ss_tot == 0.0) throw DegenerateInput("hl_fit: observed twin fractions are constant");
  fit.r2 = 1.0 - ss_res / ss_tot;
  return fit;
}

double linear_r2(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DegenerateInput("linear_r2: need two or more paired points");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DegenerateInput("linear_r2: x is constant");
  if (syy == 0.0) return 1.0;
  return sxy * sxy / (sxx * syy);
}

AblationTable ablation(const nn::NetworkParams<float>& params, const DataSet& val, const EvalConfig& cfg) {
  if (params.arch.input_dim != static_cast<int>(kCausalDim))
    throw DimensionMismatch("ablation: expects a causal (d=25) model, got d=" + std::to_string(params.arch.input_dim));
  AblationTable t;
  const ScaleEval full = evaluate(params, val, cfg, FeatureMode::causal);
  for (std::size_t k = 0; k < kFamilyCount; ++k) t.full_recall[k] = full.families[k].recall;
  for (int g = 0; g < 6; ++g) {
    const ScaleEval ab = evaluate(params, val, cfg, FeatureMode::causal, static_cast<FeatureGroup>(g));
    for (std::size_t k = 0; k < kFamilyCount; ++k) {
      const auto& r = ab.families[k].recall;
      if (t.full_recall[k] && r) t.drop[static_cast<std::size_t>(g)][k] = *t.full_recall[k] - *r;
    }
  }
  return t;
}

std::vector<GapRow> causality_gap(const nn::NetworkParams<float>& causal, const nn::NetworkParams<float>& noncausal,
                                  std::span<const DataSet* const> datasets, const EvalConfig& cfg) {
  std::vector<GapRow> out;
  for (const DataSet* ds : datasets) {
    const ScaleEval c = evaluate(causal, *ds, cfg, mode_for(causal));
    const ScaleEval nc = evaluate(noncausal, *ds, cfg, mode_for(noncausal));
    GapRow row;
    row.scale = ds->spec.tag;
    row.anchor = ds->spec.anchor;
    for (std::size_t k = 0; k < kFamilyCount; ++k) {
      row.causal_recall[k] = c.families[k].recall;
      row.noncausal_recall[k] = nc.families[k].recall;
      if (c.families[k].recall && nc.families[k].recall)
        row.delta[k] = *c.families[k].recall - *nc.families[k].recall;
    }
    out.push_back(std::move(row));
  }
  return out;
}

ModelComparison compare_models(std::span<const std::pair<std::string, const nn::NetworkParams<float>*>> models,
                               const DataSet& ds, const EvalConfig& cfg) {
  ModelComparison out;
  out.scale = ds.spec.tag;
  for (const auto& [name, params] : models) {
    out.models.push_back(name);
    out.results.push_back(evaluate(*params, ds, cfg, mode_for(*params)));
  }
  return out;
}

MeanSd mean_sd(std::span<const std::optional<double>> values) {
  std::vector<double> v;
  for (const auto& x : values)
    if (x) v.push_back(*x);
  MeanSd out;
  if (v.empty()) return out;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  out.mean = mean;
  if (v.size() >= 2) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

SeedSummary seed_summary(std::span<const ScaleEval> per_seed) {
  if (per_seed.empty()) throw InvalidArgument("seed_summary: no evaluations");
  SeedSummary s;
  s.scale = per_seed.front().scale;
  s.seeds = per_seed.size();
  for (std::size_t k = 0; k < kFamilyCount; ++k) {
    std::vector<std::optional<double>> r, f, a;
    for (const auto& e : per_seed) {
      r.push_back(e.families[k].recall);
      f.push_back(e.families[k].f1);
      a.push_back(e.families[k].auc_pr);
    }
    s.recall[k] = mean_sd(r);
    s.f1[k] = mean_sd(f);
    s.auc_pr[k] = mean_sd(a);
  }
  return s;
}

}  // namespace primefam
