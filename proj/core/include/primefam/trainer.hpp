// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "primefam/dataset.hpp"
#include "primefam/features.hpp"
#include "primefam/losses.hpp"
#include "primefam/network.hpp"

namespace primefam {

/// Seeds of the robustness sweep.
inline const std::vector<std::uint64_t> kSweepSeeds = {42, 123, 777};

struct TrainConfig {
  int epochs = 60;
  double lr0 = 1e-3;
  double weight_decay = 1e-4;
  double clip_norm = 1.0;
  std::size_t batch_size = 512;
  std::uint64_t seed = 42;
  LossConfig loss;
  /// wbce only: replace loss.class_weights with negatives/positives of the training set.
  bool weights_from_train = true;
  FeatureMode mode = FeatureMode::causal;
  nn::ArchKind arch = nn::ArchKind::residual;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  unsigned threads = 1;  // feature extraction only; the math itself is sequential

  void validate(std::size_t train_rows) const;
  nn::Architecture architecture() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  int best_epoch = -1;
  double wall_seconds = 0.0;
  /// Largest global gradient norm observed after clipping, over all steps.
  double max_clipped_norm = 0.0;
  ClassWeights class_weights{};
};

struct TrainResult {
  nn::NetworkParams<float> params;  // weights of best_epoch
  TrainLog log;
};

/// eta(t) = lr0 * (1 + cos(pi * t / total)) / 2
double cosine_lr(double lr0, int epoch, int total_epochs) noexcept;

/// Scale `grads` in place so its L2 norm is at most max_norm; returns the norm before clipping.
double clip_global_norm(std::span<float> grads, double max_norm) noexcept;

/// AdamW with bias correction and decoupled weight decay (theta -= lr * wd * theta).
class AdamW {
 public:
  AdamW(std::size_t size, double beta1, double beta2, double eps, double weight_decay);
  void step(std::span<float> params, std::span<const float> grads, double lr);
  long steps() const noexcept { return t_; }

 private:
  std::vector<float> m_;
  std::vector<float> v_;
  double beta1_, beta2_, eps_, weight_decay_;
  long t_ = 0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Train a network with per-epoch shuffling, clipping, AdamW and a per-epoch
/// cosine schedule; returns the parameters of the lowest-validation-loss
/// epoch. Throws NonFiniteLoss if a batch loss is NaN or infinite.
TrainResult train(const TrainConfig& cfg, const DataSet& train_set, const DataSet& val_set,
                  const EpochCallback& on_epoch = {});

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::optional<TrainResult> result;
  std::string error;  // set when training this seed failed
};

/// Run `train` once per seed with everything else fixed. A failing seed is
/// recorded in its outcome and the sweep continues.
std::vector<SeedOutcome> train_seed_sweep(const TrainConfig& base, std::span<const std::uint64_t> seeds,
                                          const DataSet& train_set, const DataSet& val_set,
                                          const EpochCallback& on_epoch = {});

/// CSV with columns epoch,train_loss,val_loss,lr.
void save_train_log(const TrainLog& log, const std::filesystem::path& path);

}  // namespace primefam
