// SPDX-License-Identifier: Apache-2.0
#include "primefam/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "primefam/error.hpp"

namespace primefam {

namespace {

std::string fam(std::size_t k) { return std::string(family_name(kFamilies[k])); }
std::string title(std::size_t k) { return std::string(family_title(kFamilies[k])); }
std::string num(std::optional<double> v) { return format_number(v); }
std::string u64(std::uint64_t v) { return std::to_string(v); }

std::string pct(std::optional<double> v) {
  if (!v) return "NA";
  return format_fixed(*v * 100.0, 1) + "%";
}

std::string anchor_text(std::uint64_t a) {
  if (a == 0) return "mixed";
  int e = 0;
  std::uint64_t m = a;
  while (m % 10 == 0) {
    m /= 10;
    ++e;
  }
  if (e < 3) return u64(a);
  return (m == 1 ? std::string() : u64(m) + "x") + "10^" + std::to_string(e);
}

}  // namespace

double ParamCountNote::relative_diff() const noexcept {
  return (static_cast<double>(counted) - static_cast<double>(reference)) / static_cast<double>(reference);
}

Table density_csv(const std::vector<DensityRow>& rows, const std::optional<HlFit>& hl) {
  Table t;
  t.columns = {"scale", "anchor", "rows", "twin_fraction", "isolated_fraction", "hl_predicted"};
  for (std::size_t k = 0; k < kFamilyCount; ++k) t.columns.push_back("prevalence_" + fam(k));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::vector<std::string> row = {r.scale, u64(r.anchor), u64(r.rows), num(r.twin_fraction),
                                    num(r.isolated_fraction)};
    row.push_back(hl && i < hl->predicted.size() ? num(hl->predicted[i]) : "NA");
    for (double p : r.prevalence) row.push_back(num(p));
    t.add_row(std::move(row));
  }
  return t;
}

Table recall_by_scale_csv(const std::vector<ScaleEval>& evals) {
  Table t;
  t.columns = {"scale",  "anchor", "family", "tp",    "fp",    "fn",
               "tn",     "recall", "precision", "f1", "auc_pr", "brier", "search_reduction", "prevalence"};
  for (const auto& e : evals)
    for (std::size_t k = 0; k < kFamilyCount; ++k) {
      const auto& m = e.families[k];
      t.add_row({e.scale, u64(e.anchor), fam(k), u64(m.tp), u64(m.fp), u64(m.fn), u64(m.tn), num(m.recall),
                 num(m.precision), num(m.f1), num(m.auc_pr), num(m.brier), num(m.search_reduction),
                 num(m.prevalence)});
    }
  return t;
}

Table ablation_csv(const AblationTable& a) {
  Table t;
  t.columns = {"group"};
  for (std::size_t k = 0; k < kFamilyCount; ++k) t.columns.push_back(fam(k));
  for (std::size_t g = 0; g < a.drop.size(); ++g) {
    std::vector<std::string> row = {std::string(1, group_letter(static_cast<FeatureGroup>(g)))};
    for (const auto& d : a.drop[g]) row.push_back(num(d));
    t.add_row(std::move(row));
  }
  return t;
}

Table loss_comparison_csv(const std::vector<ModelComparison>& cmp) {
  Table t;
  t.columns = {"scale", "model", "family", "recall", "precision", "f1", "auc_pr", "brier", "search_reduction"};
  for (const auto& c : cmp)
    for (std::size_t i = 0; i < c.models.size(); ++i)
      for (std::size_t k = 0; k < kFamilyCount; ++k) {
        const auto& m = c.results[i].families[k];
        t.add_row({c.scale, c.models[i], fam(k), num(m.recall), num(m.precision), num(m.f1), num(m.auc_pr),
                   num(m.brier), num(m.search_reduction)});
      }
  return t;
}

Table seed_robustness_csv(const std::vector<SeedSummary>& seeds) {
  Table t;
  t.columns = {"scale",   "family", "seeds",     "recall_mean", "recall_sd",
               "f1_mean", "f1_sd",  "auc_pr_mean", "auc_pr_sd"};
  for (const auto& s : seeds)
    for (std::size_t k = 0; k < kFamilyCount; ++k)
      t.add_row({s.scale, fam(k), u64(s.seeds), num(s.recall[k].mean), num(s.recall[k].sd), num(s.f1[k].mean),
                 num(s.f1[k].sd), num(s.auc_pr[k].mean), num(s.auc_pr[k].sd)});
  return t;
}

Table causality_gap_csv(const std::vector<GapRow>& rows) {
  Table t;
  t.columns = {"scale", "anchor", "family", "causal_recall", "noncausal_recall", "delta"};
  for (const auto& r : rows)
    for (std::size_t k = 0; k < kFamilyCount; ++k)
      t.add_row({r.scale, u64(r.anchor), fam(k), num(r.causal_recall[k]), num(r.noncausal_recall[k]),
                 num(r.delta[k])});
  return t;
}

std::string render_markdown(const ReportBundle& b) {
  std::ostringstream md;
  md << "# " << b.title << "\n";
  auto fixed3 = [](std::optional<double> v) { return format_fixed(v, 3); };
  auto signed3 = [](std::optional<double> v) {
    if (!v) return std::string("NA");
    std::string s = format_fixed(v, 3);
    return s[0] == '-' ? s : "+" + s;
  };
  auto section = [&](const std::string& heading, const Table& t) { md << "\n## " << heading << "\n\n" << to_markdown(t); };

  if (b.params) {
    const auto& p = *b.params;
    md << "\n## Parameter count\n\n";
    md << "- Residual network: " << p.counted << " parameters (reference " << p.reference << ", "
       << format_fixed(p.relative_diff() * 100.0, 2) << "% difference).\n";
    if (p.shallow_counted)
      md << "- Shallow baseline: " << *p.shallow_counted << " parameters (reference " << p.shallow_reference
         << ").\n";
    md << "- Counts follow from the layer shapes. The reference figures depend on LayerNorm and bias "
          "conventions that are not fully stated, so the gap is expected.\n";
  }

  if (b.density) {
    Table t;
    t.columns = {"Scale", "Primes", "Twin", "Isolated"};
    if (b.hl) t.columns.push_back("c/ln N");
    for (std::size_t i = 0; i < b.density->size(); ++i) {
      const auto& r = (*b.density)[i];
      std::vector<std::string> row = {anchor_text(r.anchor), u64(r.rows), pct(r.twin_fraction),
                                      pct(r.isolated_fraction)};
      if (b.hl) row.push_back(i < b.hl->predicted.size() ? pct(b.hl->predicted[i]) : "NA");
      t.add_row(std::move(row));
    }
    section("Prime density by scale", t);
    if (b.hl)
      md << "\nFit c/ln N calibrated at the smallest scale: c = " << format_fixed(b.hl->c, 4)
         << ", implied C2 = " << format_fixed(b.hl->implied_c2, 4) << ", R^2 = " << format_fixed(b.hl->r2, 4)
         << ".\n";
  }

  if (b.recall_by_scale) {
    Table t;
    t.columns = {"Family"};
    for (const auto& e : *b.recall_by_scale) t.columns.push_back(e.scale + " (" + anchor_text(e.anchor) + ")");
    for (std::size_t k = 0; k < kFamilyCount; ++k) {
      std::vector<std::string> row = {title(k)};
      for (const auto& e : *b.recall_by_scale) row.push_back(fixed3(e.families[k].recall));
      t.add_row(std::move(row));
    }
    section("Recall by scale", t);
    Table s;
    s.columns = t.columns;
    for (std::size_t k = 0; k < kFamilyCount; ++k) {
      std::vector<std::string> row = {title(k)};
      for (const auto& e : *b.recall_by_scale) row.push_back(pct(e.families[k].search_reduction));
      s.add_row(std::move(row));
    }
    section("Search-space reduction by scale", s);
  }

  if (b.ablation) {
    Table t;
    t.columns = {"Group zeroed"};
    for (std::size_t k = 0; k < kFamilyCount; ++k) t.columns.push_back(title(k));
    std::vector<std::string> full = {"none (recall)"};
    for (const auto& r : b.ablation->full_recall) full.push_back(fixed3(r));
    t.add_row(std::move(full));
    for (std::size_t g = 0; g < b.ablation->drop.size(); ++g) {
      std::vector<std::string> row = {std::string(1, group_letter(static_cast<FeatureGroup>(g)))};
      for (const auto& d : b.ablation->drop[g]) row.push_back(signed3(d));
      t.add_row(std::move(row));
    }
    section("Feature-group ablation (recall drop)", t);
  }

  if (b.comparison) {
    for (const auto& c : *b.comparison) {
      Table t;
      t.columns = {"Family"};
      for (const auto& m : c.models) t.columns.push_back(m + " recall");
      for (const auto& m : c.models) t.columns.push_back(m + " AUC-PR");
      for (std::size_t k = 0; k < kFamilyCount; ++k) {
        std::vector<std::string> row = {title(k)};
        for (const auto& r : c.results) row.push_back(fixed3(r.families[k].recall));
        for (const auto& r : c.results) row.push_back(fixed3(r.families[k].auc_pr));
        t.add_row(std::move(row));
      }
      section("Loss comparison at " + c.scale, t);
    }
  }

  if (b.seeds) {
    for (const auto& s : *b.seeds) {
      Table t;
      t.columns = {"Family", "Recall mean", "Recall sd", "F1 mean", "F1 sd", "AUC-PR mean", "AUC-PR sd"};
      for (std::size_t k = 0; k < kFamilyCount; ++k)
        t.add_row({title(k), fixed3(s.recall[k].mean), format_fixed(s.recall[k].sd, 4), fixed3(s.f1[k].mean),
                   format_fixed(s.f1[k].sd, 4), fixed3(s.auc_pr[k].mean), format_fixed(s.auc_pr[k].sd, 4)});
      section("Seed robustness at " + s.scale + " (" + std::to_string(s.seeds) + " seeds)", t);
    }
  }

  if (b.gap) {
    Table t;
    t.columns = {"Family"};
    for (const auto& r : *b.gap) t.columns.push_back(r.scale);
    for (std::size_t k = 0; k < kFamilyCount; ++k) {
      std::vector<std::string> row = {title(k)};
      for (const auto& r : *b.gap)
        row.push_back(fixed3(r.causal_recall[k]) + " / " + fixed3(r.noncausal_recall[k]) + " (" +
                      signed3(r.delta[k]) + ")");
      t.add_row(std::move(row));
    }
    section("Causal vs non-causal recall (causal / non-causal, delta)", t);
  }

  if (!b.notes.empty()) {
    md << "\n## Notes\n\n";
    for (const auto& n : b.notes) md << "- " << n << "\n";
  }
  return md.str();
}

std::vector<std::filesystem::path> emit_report(const ReportBundle& b, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto put = [&](const char* name, const Table& t) {
    write_csv(t, dir / name);
    written.push_back(dir / name);
  };
  if (b.density) put("density.csv", density_csv(*b.density, b.hl));
  if (b.recall_by_scale) put("recall_by_scale.csv", recall_by_scale_csv(*b.recall_by_scale));
  if (b.ablation) put("ablation.csv", ablation_csv(*b.ablation));
  if (b.comparison) put("loss_comparison.csv", loss_comparison_csv(*b.comparison));
  if (b.seeds) put("seed_robustness.csv", seed_robustness_csv(*b.seeds));
  if (b.gap) put("causality_gap.csv", causality_gap_csv(*b.gap));

  const auto md_path = dir / "report.md";
  std::ofstream out(md_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + md_path.string() + " for writing");
  out << render_markdown(b);
  out.flush();
  if (!out) throw IoError("write failed for " + md_path.string());
  written.push_back(md_path);
  return written;
}

}  // namespace primefam
