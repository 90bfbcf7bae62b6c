// SPDX-License-Identifier: Apache-2.0
#include "primefam_cli/cli.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "primefam/dataset.hpp"
#include "primefam/error.hpp"
#include "primefam/evaluator.hpp"
#include "primefam/network.hpp"
#include "primefam/parallel.hpp"
#include "primefam/report.hpp"
#include "primefam/trainer.hpp"
#include "primefam_cli/manifest.hpp"

namespace primefam::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kEvalSplits = {"val", "ood10", "ood12", "ood14", "ood16"};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (item.empty()) throw InvalidArgument("empty item in list '" + text + "'");
    out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

unsigned resolve_threads(unsigned flag) { return flag > 0 ? flag : default_threads(); }

DataSet load_split(Manifest& m, const fs::path& data_dir, const std::string& name) {
  const fs::path path = data_dir / (name + ".csv");
  if (!fs::exists(path)) throw IoError("dataset not found: " + path.string());
  DataSet ds = load_csv(path);
  m.add_input(path);
  return ds;
}

nn::Checkpoint load_model(Manifest& m, const fs::path& path, int expected_dim = 0) {
  if (!fs::exists(path)) throw IoError("checkpoint not found: " + path.string());
  nn::Checkpoint ck = nn::load_checkpoint(path, expected_dim);
  m.add_input(path);
  return ck;
}

void emit(Manifest& m, const ReportBundle& bundle) {
  for (const auto& p : emit_report(bundle, m.dir())) m.add_output(p);
}

ParamCountNote param_note(const nn::Architecture& arch) {
  ParamCountNote note;
  note.counted = nn::count_params(nn::Architecture::residual_net(arch.input_dim));
  note.shallow_counted = nn::count_params(nn::Architecture::shallow_net(arch.input_dim));
  return note;
}

// ------------------------------------------------------------------ flags

struct TrainFlags {
  std::string loss = "wbce";
  std::string mode = "causal";
  std::string arch = "residual";
  std::uint64_t seed = 42;
  int epochs = 60;
  std::size_t batch = 512;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  double clip = 1.0;

  void add_to(CLI::App* app) {
    app->add_option("--loss", loss, "wbce, focal or asl")->check(CLI::IsMember({"wbce", "focal", "asl"}));
    app->add_option("--mode", mode, "causal or noncausal")->check(CLI::IsMember({"causal", "noncausal"}));
    app->add_option("--arch", arch, "residual or shallow")->check(CLI::IsMember({"residual", "shallow"}));
    app->add_option("--seed", seed, "seed for init, dropout and shuffling");
    app->add_option("--epochs", epochs)->check(CLI::PositiveNumber);
    app->add_option("--batch", batch)->check(CLI::PositiveNumber);
    app->add_option("--lr", lr, "peak learning rate")->check(CLI::PositiveNumber);
    app->add_option("--weight-decay", weight_decay)->check(CLI::NonNegativeNumber);
    app->add_option("--clip", clip, "global gradient-norm bound")->check(CLI::PositiveNumber);
  }

  TrainConfig config(unsigned threads) const {
    TrainConfig cfg;
    cfg.loss.kind = parse_loss(loss);
    cfg.mode = parse_mode(mode);
    cfg.arch = arch == "shallow" ? nn::ArchKind::shallow : nn::ArchKind::residual;
    cfg.seed = seed;
    cfg.epochs = epochs;
    cfg.batch_size = batch;
    cfg.lr0 = lr;
    cfg.weight_decay = weight_decay;
    cfg.clip_norm = clip;
    cfg.threads = threads;
    return cfg;
  }

  json to_json() const {
    return {{"loss", loss}, {"mode", mode},  {"arch", arch},   {"seed", seed},           {"epochs", epochs},
            {"batch", batch}, {"lr", lr}, {"weight_decay", weight_decay}, {"clip", clip}};
  }
};

void progress(const EpochRecord& r) {
  std::cerr << "epoch " << r.epoch << " train_loss " << format_fixed(r.train_loss, 6) << " val_loss "
            << format_fixed(r.val_loss, 6) << " lr " << format_number(r.lr) << "\n";
}

// ------------------------------------------------------------------ gen

struct GenArgs {
  std::string suite;
  std::string anchor;
  std::size_t count = 0;
  std::string window = "0";
  std::string mode = "single";
  std::string tag;
  std::uint64_t seed = 42;
  std::string out = "data";
  unsigned threads = 0;
};

void cmd_gen(const GenArgs& a) {
  const unsigned threads = resolve_threads(a.threads);
  std::vector<SampleSpec> specs;
  if (!a.suite.empty()) {
    if (a.suite != "standard") throw InvalidArgument("unknown suite '" + a.suite + "'");
    if (!a.anchor.empty() || a.count != 0) throw InvalidArgument("--suite cannot be combined with --anchor/--count");
    specs = standard_suite_specs(a.seed);
  } else {
    if (a.count == 0) throw InvalidArgument("--count must be positive");
    SampleSpec s;
    s.mode = a.mode == "train_mix" ? SampleMode::train_mix : SampleMode::single_scale;
    if (s.mode == SampleMode::single_scale) {
      if (a.anchor.empty()) throw InvalidArgument("--anchor is required without --suite");
      s.anchor = parse_scale(a.anchor);
    } else {
      s.anchor = kTrainAnchors[0];
    }
    s.count = a.count;
    s.window = parse_scale(a.window);
    s.seed = a.seed;
    s.tag = a.tag.empty() ? (s.mode == SampleMode::train_mix ? "train" : scale_label(s.anchor)) : a.tag;
    specs.push_back(s);
  }

  json cfg = {{"suite", a.suite}, {"seed", a.seed}, {"threads", threads}};
  if (a.suite.empty())
    cfg.update({{"anchor", specs[0].anchor}, {"count", a.count}, {"window", specs[0].window}, {"mode", a.mode},
                {"tag", specs[0].tag}});
  Manifest m(a.out, "gen", cfg);

  std::map<std::string, DataSet> made;
  if (!a.suite.empty()) {
    made = standard_suite(a.seed, threads);
  } else {
    made.emplace(specs[0].tag, sample_primes(specs[0], threads));
  }
  for (const auto& spec : specs) {
    const fs::path path = fs::path(a.out) / (spec.tag + ".csv");
    save_csv(made.at(spec.tag), path);
    m.add_output(path);
    std::cerr << "wrote " << path.string() << " (" << made.at(spec.tag).size() << " rows)\n";
  }
  m.finalize();
}

// ------------------------------------------------------------------ train

struct TrainArgs {
  TrainFlags flags;
  std::string data = "data";
  std::string out = "run";
  unsigned threads = 0;
};

void cmd_train(const TrainArgs& a) {
  const unsigned threads = resolve_threads(a.threads);
  json cfg = a.flags.to_json();
  cfg["data"] = a.data;
  cfg["threads"] = threads;
  Manifest m(a.out, "train", cfg);
  const DataSet train_set = load_split(m, a.data, "train");
  const DataSet val_set = load_split(m, a.data, "val");

  const TrainConfig tc = a.flags.config(threads);
  TrainResult res = train(tc, train_set, val_set, progress);

  const fs::path ckpt = fs::path(a.out) / "model.ckpt";
  nn::save_checkpoint(res.params, {tc.seed, std::string(loss_name(tc.loss.kind)),
                                   static_cast<std::uint32_t>(res.log.best_epoch)},
                      ckpt);
  m.add_output(ckpt);
  const fs::path log = fs::path(a.out) / "train_log.csv";
  save_train_log(res.log, log);
  m.add_output(log);
  std::cerr << "best epoch " << res.log.best_epoch << ", " << nn::count_params(res.params) << " parameters\n";
  m.finalize();
}

// ------------------------------------------------------------------ eval & friends

struct EvalArgs {
  std::string model;
  std::string mode;
  std::string data = "data";
  std::string splits;
  double threshold = 0.5;
  std::string out = "report";
  unsigned threads = 0;
};

std::vector<std::string> present_splits(const std::string& data, const std::string& requested) {
  if (!requested.empty()) return split_list(requested);
  std::vector<std::string> out;
  for (const auto& s : kEvalSplits)
    if (fs::exists(fs::path(data) / (s + ".csv"))) out.push_back(s);
  if (out.empty()) throw IoError("no evaluation splits found in " + data);
  return out;
}

EvalConfig eval_config(double threshold, unsigned threads) {
  EvalConfig ec;
  ec.threshold = threshold;
  ec.threads = threads;
  ec.validate();
  return ec;
}

void cmd_eval(const EvalArgs& a) {
  const unsigned threads = resolve_threads(a.threads);
  if (!fs::exists(a.model)) throw IoError("checkpoint not found: " + a.model);
  const auto splits = present_splits(a.data, a.splits);
  Manifest m(a.out, "eval",
             {{"model", a.model}, {"mode", a.mode}, {"data", a.data}, {"splits", splits},
              {"threshold", a.threshold}, {"threads", threads}});
  const int expect = a.mode.empty() ? 0 : static_cast<int>(feature_dim(parse_mode(a.mode)));
  const nn::Checkpoint ck = load_model(m, a.model, expect);
  const EvalConfig ec = eval_config(a.threshold, threads);
  const FeatureMode mode = mode_for(ck.params);

  ReportBundle b;
  b.title = "Evaluation of " + fs::path(a.model).filename().string();
  b.recall_by_scale.emplace();
  for (const auto& s : splits) b.recall_by_scale->push_back(evaluate(ck.params, load_split(m, a.data, s), ec, mode));
  b.params = param_note(ck.params.arch);
  b.notes.push_back("Threshold " + format_number(a.threshold) + "; a prediction is positive when yhat >= threshold.");
  emit(m, b);
  m.finalize();
}

struct AblateArgs {
  std::string model;
  std::string data = "data";
  std::string split = "val";
  double threshold = 0.5;
  std::string out = "report";
  unsigned threads = 0;
};

void cmd_ablate(const AblateArgs& a) {
  const unsigned threads = resolve_threads(a.threads);
  Manifest m(a.out, "ablate",
             {{"model", a.model}, {"data", a.data}, {"split", a.split}, {"threshold", a.threshold},
              {"threads", threads}});
  const nn::Checkpoint ck = load_model(m, a.model, static_cast<int>(kCausalDim));
  ReportBundle b;
  b.title = "Feature-group ablation of " + fs::path(a.model).filename().string();
  b.ablation = ablation(ck.params, load_split(m, a.data, a.split), eval_config(a.threshold, threads));
  emit(m, b);
  m.finalize();
}

struct GapArgs {
  std::string causal;
  std::string noncausal;
  std::string data = "data";
  std::string splits;
  double threshold = 0.5;
  std::string out = "report";
  unsigned threads = 0;
};

void cmd_gap(const GapArgs& a) {
  const unsigned threads = resolve_threads(a.threads);
  const auto splits = present_splits(a.data, a.splits);
  Manifest m(a.out, "gap",
             {{"causal", a.causal}, {"noncausal", a.noncausal}, {"data", a.data}, {"splits", splits},
              {"threshold", a.threshold}, {"threads", threads}});
  const nn::Checkpoint c = load_model(m, a.causal, static_cast<int>(kCausalDim));
  const nn::Checkpoint nc = load_model(m, a.noncausal, static_cast<int>(kNonCausalDim));
  std::vector<DataSet> sets;
  for (const auto& s : splits) sets.push_back(load_split(m, a.data, s));
  std::vector<const DataSet*> ptrs;
  for (const auto& s : sets) ptrs.push_back(&s);
  ReportBundle b;
  b.title = "Cost of causal inference";
  b.gap = causality_gap(c.params, nc.params, ptrs, eval_config(a.threshold, threads));
  emit(m, b);
  m.finalize();
}

struct CompareArgs {
  std::vector<std::string> models;  // name=path
  std::string data = "data";
  std::string splits = "val";
  double threshold = 0.5;
  std::string out = "report";
  unsigned threads = 0;
};

void cmd_compare(const CompareArgs& a) {
  const unsigned threads = resolve_threads(a.threads);
  const auto splits = split_list(a.splits);
  Manifest m(a.out, "compare",
             {{"models", a.models}, {"data", a.data}, {"splits", splits}, {"threshold", a.threshold},
              {"threads", threads}});
  std::vector<std::pair<std::string, nn::Checkpoint>> loaded;
  for (const auto& spec : a.models) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      throw InvalidArgument("--model expects name=path, got '" + spec + "'");
    loaded.emplace_back(spec.substr(0, eq), load_model(m, spec.substr(eq + 1)));
  }
  std::vector<std::pair<std::string, const nn::NetworkParams<float>*>> refs;
  for (const auto& [name, ck] : loaded) refs.emplace_back(name, &ck.params);
  const EvalConfig ec = eval_config(a.threshold, threads);
  ReportBundle b;
  b.title = "Loss comparison";
  b.comparison.emplace();
  for (const auto& s : splits) b.comparison->push_back(compare_models(refs, load_split(m, a.data, s), ec));
  emit(m, b);
  m.finalize();
}

struct SeedsArgs {
  TrainFlags flags;
  std::string seeds = "42,123,777";
  std::string data = "data";
  std::string splits = "val,ood12,ood16";
  std::vector<std::string> checkpoints;
  double threshold = 0.5;
  std::string out = "seeds";
  unsigned threads = 0;
};

void cmd_seeds(const SeedsArgs& a) {
  const unsigned threads = resolve_threads(a.threads);
  const auto seeds = parse_scale_list(a.seeds);
  const auto splits = split_list(a.splits);
  json cfg = a.flags.to_json();
  cfg.erase("seed");
  cfg.update({{"seeds", seeds}, {"data", a.data}, {"splits", splits}, {"checkpoints", a.checkpoints},
              {"threshold", a.threshold}, {"threads", threads}});
  Manifest m(a.out, "seeds", cfg);

  std::vector<nn::NetworkParams<float>> models;
  std::vector<std::uint64_t> used_seeds;
  if (!a.checkpoints.empty()) {
    for (const auto& p : a.checkpoints) {
      nn::Checkpoint ck = load_model(m, p);
      used_seeds.push_back(ck.meta.seed);
      models.push_back(std::move(ck.params));
    }
  } else {
    const DataSet train_set = load_split(m, a.data, "train");
    const DataSet val_set = load_split(m, a.data, "val");
    const TrainConfig base = a.flags.config(threads);
    for (auto& outcome : train_seed_sweep(base, seeds, train_set, val_set, progress)) {
      if (!outcome.result) {
        std::cerr << "seed " << outcome.seed << " failed: " << outcome.error << "\n";
        continue;
      }
      const fs::path ckpt = fs::path(a.out) / ("seed_" + std::to_string(outcome.seed) + ".ckpt");
      nn::save_checkpoint(outcome.result->params,
                          {outcome.seed, std::string(loss_name(base.loss.kind)),
                           static_cast<std::uint32_t>(outcome.result->log.best_epoch)},
                          ckpt);
      m.add_output(ckpt);
      const fs::path log = fs::path(a.out) / ("seed_" + std::to_string(outcome.seed) + "_log.csv");
      save_train_log(outcome.result->log, log);
      m.add_output(log);
      used_seeds.push_back(outcome.seed);
      models.push_back(std::move(outcome.result->params));
    }
    if (models.empty()) throw NonFiniteLoss(-1, -1, "every seed of the sweep failed");
  }

  const EvalConfig ec = eval_config(a.threshold, threads);
  ReportBundle b;
  b.title = "Seed robustness";
  b.seeds.emplace();
  for (const auto& s : splits) {
    const DataSet ds = load_split(m, a.data, s);
    std::vector<ScaleEval> per_seed;
    for (const auto& p : models) per_seed.push_back(evaluate(p, ds, ec, mode_for(p)));
    b.seeds->push_back(seed_summary(per_seed));
  }
  std::string seed_text;
  for (auto s : used_seeds) seed_text += (seed_text.empty() ? "" : ", ") + std::to_string(s);
  b.notes.push_back("Seeds: " + seed_text + ". Spread is the sample standard deviation (n - 1).");
  emit(m, b);
  m.finalize();
}

struct DensityArgs {
  std::string scales = "5e8,1e10,1e12,1e14,1e16";
  std::size_t count = 20000;
  std::string window = "0";
  std::uint64_t seed = 42;
  std::string data;
  std::string splits;
  std::string out = "report";
  unsigned threads = 0;
};

void cmd_density(const DensityArgs& a) {
  const unsigned threads = resolve_threads(a.threads);
  json cfg = {{"seed", a.seed}, {"threads", threads}};
  std::vector<DataSet> sets;
  if (!a.data.empty()) {
    const auto splits = present_splits(a.data, a.splits);
    cfg.update({{"data", a.data}, {"splits", splits}});
    Manifest m(a.out, "density", cfg);
    for (const auto& s : splits) sets.push_back(load_split(m, a.data, s));
    std::vector<const DataSet*> ptrs;
    for (const auto& s : sets) ptrs.push_back(&s);
    ReportBundle b;
    b.title = "Prime density by scale";
    b.density = density_table(ptrs);
    if (sets.size() >= 2) b.hl = hl_fit(*b.density);
    emit(m, b);
    m.finalize();
    return;
  }
  if (a.count == 0) throw InvalidArgument("--count must be positive");
  const auto scales = parse_scale_list(a.scales);
  const std::uint64_t window = parse_scale(a.window);
  cfg.update({{"scales", scales}, {"count", a.count}, {"window", window}});
  Manifest m(a.out, "density", cfg);
  for (auto s : scales) {
    SampleSpec spec{s, a.count, window, a.seed, SampleMode::single_scale, scale_label(s)};
    std::cerr << "sampling " << a.count << " primes at " << scale_label(s) << "\n";
    sets.push_back(sample_primes(spec, threads));
  }
  std::vector<const DataSet*> ptrs;
  for (const auto& s : sets) ptrs.push_back(&s);
  ReportBundle b;
  b.title = "Prime density by scale";
  b.density = density_table(ptrs);
  if (sets.size() >= 2) b.hl = hl_fit(*b.density);
  emit(m, b);
  m.finalize();
}

template <typename F>
int guarded(F&& body) {
  try {
    body();
    return kOk;
  } catch (const NonFiniteLoss& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNonFinite;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMismatch;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMismatch;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Prime family classification: data generation, training and evaluation", "primefam"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PRIMEFAM_VERSION);

  auto threads_opt = [](CLI::App* sub, unsigned& t) {
    sub->add_option("--threads", t, "worker threads (default: PRIMESIEVE_THREADS or 1)");
  };

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "sample prime datasets");
  g->add_option("--suite", gen.suite, "named suite (standard)");
  g->add_option("--anchor", gen.anchor, "lower end of the window, e.g. 5e8");
  g->add_option("--count", gen.count, "number of primes");
  g->add_option("--window", gen.window, "window width (0: default for the anchor)");
  g->add_option("--sample-mode", gen.mode, "single or train_mix")->check(CLI::IsMember({"single", "train_mix"}));
  g->add_option("--tag", gen.tag, "split name written to the file");
  g->add_option("--seed", gen.seed);
  g->add_option("--out", gen.out, "output directory");
  threads_opt(g, gen.threads);

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train one model on <data>/train.csv with <data>/val.csv for selection");
  tr.flags.add_to(t);
  t->add_option("--data", tr.data, "dataset directory");
  t->add_option("--out", tr.out, "output directory");
  threads_opt(t, tr.threads);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "per-family metrics of one checkpoint across splits");
  e->add_option("--model", ev.model, "checkpoint")->required();
  e->add_option("--mode", ev.mode, "expected feature mode")->check(CLI::IsMember({"causal", "noncausal"}));
  e->add_option("--data", ev.data, "dataset directory");
  e->add_option("--splits", ev.splits, "comma-separated split names (default: every eval split present)");
  e->add_option("--threshold", ev.threshold);
  e->add_option("--out", ev.out, "output directory");
  threads_opt(e, ev.threads);

  AblateArgs ab;
  auto* a = app.add_subcommand("ablate", "recall drop when each feature group is zeroed");
  a->add_option("--model", ab.model, "causal checkpoint")->required();
  a->add_option("--data", ab.data, "dataset directory");
  a->add_option("--split", ab.split);
  a->add_option("--threshold", ab.threshold);
  a->add_option("--out", ab.out, "output directory");
  threads_opt(a, ab.threads);

  GapArgs gp;
  auto* gg = app.add_subcommand("gap", "causal versus non-causal recall per split");
  gg->add_option("--causal", gp.causal, "causal checkpoint")->required();
  gg->add_option("--noncausal", gp.noncausal, "non-causal checkpoint")->required();
  gg->add_option("--data", gp.data, "dataset directory");
  gg->add_option("--splits", gp.splits);
  gg->add_option("--threshold", gp.threshold);
  gg->add_option("--out", gp.out, "output directory");
  threads_opt(gg, gp.threads);

  CompareArgs cp;
  auto* c = app.add_subcommand("compare", "compare checkpoints trained with different losses");
  c->add_option("--model", cp.models, "name=checkpoint, repeatable")->required();
  c->add_option("--data", cp.data, "dataset directory");
  c->add_option("--splits", cp.splits);
  c->add_option("--threshold", cp.threshold);
  c->add_option("--out", cp.out, "output directory");
  threads_opt(c, cp.threads);

  SeedsArgs sd;
  auto* s = app.add_subcommand("seeds", "train one model per seed and summarise the spread");
  sd.flags.add_to(s);
  s->remove_option(s->get_option("--seed"));
  s->add_option("--seeds", sd.seeds, "comma-separated seeds");
  s->add_option("--data", sd.data, "dataset directory");
  s->add_option("--splits", sd.splits);
  s->add_option("--checkpoint", sd.checkpoints, "evaluate existing checkpoints instead of training (repeatable)");
  s->add_option("--threshold", sd.threshold);
  s->add_option("--out", sd.out, "output directory");
  threads_opt(s, sd.threads);

  DensityArgs dn;
  auto* d = app.add_subcommand("density", "twin and isolated fractions by scale with a c/ln N fit");
  d->add_option("--scales", dn.scales, "comma-separated anchors");
  d->add_option("--count", dn.count, "primes per scale");
  d->add_option("--window", dn.window);
  d->add_option("--seed", dn.seed);
  d->add_option("--data", dn.data, "use dataset files instead of sampling");
  d->add_option("--splits", dn.splits);
  d->add_option("--out", dn.out, "output directory");
  threads_opt(d, dn.threads);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  if (!argv_rev.empty()) argv_rev.pop_back();  // program name
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  if (*g) return guarded([&] { cmd_gen(gen); });
  if (*t) return guarded([&] { cmd_train(tr); });
  if (*e) return guarded([&] { cmd_eval(ev); });
  if (*a) return guarded([&] { cmd_ablate(ab); });
  if (*gg) return guarded([&] { cmd_gap(gp); });
  if (*c) return guarded([&] { cmd_compare(cp); });
  if (*s) return guarded([&] { cmd_seeds(sd); });
  if (*d) return guarded([&] { cmd_density(dn); });
  return kUsage;
}

int run_cli(int argc, char** argv) { return run_cli(std::vector<std::string>(argv, argv + argc)); }

}  // namespace primefam::cli
