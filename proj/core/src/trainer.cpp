// SPDX-License-Identifier: Apache-2.0
#include "primefam/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>

#include "primefam/error.hpp"
#include "primefam/rng.hpp"
#include "primefam/table.hpp"
#include "primefam/tensors.hpp"

namespace primefam {
namespace {

using Mat = nn::Matrix<float>;

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed, int epoch) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  CounterRng rng = CounterRng::derive(seed, Stream::shuffle, {static_cast<std::uint64_t>(epoch)});
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
  return idx;
}

Mat gather(const Mat& src, const std::vector<std::size_t>& idx, std::size_t begin, std::size_t end) {
  Mat out(static_cast<Eigen::Index>(end - begin), src.cols());
  for (std::size_t i = begin; i < end; ++i)
    out.row(static_cast<Eigen::Index>(i - begin)) = src.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

}  // namespace

void TrainConfig::validate(std::size_t train_rows) const {
  if (epochs <= 0) throw InvalidArgument("TrainConfig: epochs must be positive");
  if (!(lr0 > 0.0) || weight_decay < 0.0 || !(clip_norm > 0.0))
    throw InvalidArgument("TrainConfig: lr0 and clip_norm must be positive, weight_decay non-negative");
  if (batch_size == 0 || batch_size > train_rows)
    throw InvalidArgument("TrainConfig: batch size " + std::to_string(batch_size) + " must lie in [1, " +
                          std::to_string(train_rows) + "]");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && adam_eps > 0.0))
    throw InvalidArgument("TrainConfig: invalid Adam hyper-parameters");
  loss.validate();
}

nn::Architecture TrainConfig::architecture() const {
  const int d = static_cast<int>(feature_dim(mode));
  return arch == nn::ArchKind::shallow ? nn::Architecture::shallow_net(d) : nn::Architecture::residual_net(d);
}

double cosine_lr(double lr0, int epoch, int total_epochs) noexcept {
  return lr0 * (1.0 + std::cos(std::numbers::pi * epoch / total_epochs)) / 2.0;
}

double clip_global_norm(std::span<float> grads, double max_norm) noexcept {
  double sq = 0.0;
  for (float g : grads) sq += static_cast<double>(g) * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const auto coef = static_cast<float>(max_norm / (norm + 1e-6));
    for (float& g : grads) g *= coef;
  }
  return norm;
}

AdamW::AdamW(std::size_t size, double beta1, double beta2, double eps, double weight_decay)
    : m_(size, 0.0f), v_(size, 0.0f), beta1_(beta1), beta2_(beta2), eps_(eps), weight_decay_(weight_decay) {}

void AdamW::step(std::span<float> params, std::span<const float> grads, double lr) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw DimensionMismatch("AdamW::step: parameter/gradient size mismatch");
  ++t_;
  const auto b1 = static_cast<float>(beta1_);
  const auto b2 = static_cast<float>(beta2_);
  const auto c1 = static_cast<float>(1.0 / (1.0 - std::pow(beta1_, static_cast<double>(t_))));
  const auto c2 = static_cast<float>(1.0 / (1.0 - std::pow(beta2_, static_cast<double>(t_))));
  const auto step = static_cast<float>(lr);
  const auto decay = static_cast<float>(lr * weight_decay_);
  const auto eps = static_cast<float>(eps_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const float g = grads[i];
    m_[i] = b1 * m_[i] + (1.0f - b1) * g;
    v_[i] = b2 * v_[i] + (1.0f - b2) * g * g;
    const float mhat = m_[i] * c1;
    const float vhat = v_[i] * c2;
    params[i] -= decay * params[i];
    params[i] -= step * mhat / (std::sqrt(vhat) + eps);
  }
}

TrainResult train(const TrainConfig& cfg_in, const DataSet& train_set, const DataSet& val_set,
                  const EpochCallback& on_epoch) {
  if (train_set.rows.empty() || val_set.rows.empty()) throw InvalidArgument("train: datasets must be non-empty");
  TrainConfig cfg = cfg_in;
  if (cfg.loss.kind == LossKind::wbce && cfg.weights_from_train) cfg.loss.class_weights = class_weights_from(train_set);
  cfg.validate(train_set.rows.size());

  const auto start = std::chrono::steady_clock::now();
  const Mat x_train = feature_matrix<float>(train_set, cfg.mode, std::nullopt, cfg.threads);
  const Mat y_train = label_matrix<float>(train_set);
  const Mat x_val = feature_matrix<float>(val_set, cfg.mode, std::nullopt, cfg.threads);
  const Mat y_val = label_matrix<float>(val_set);

  auto params = nn::NetworkParams<float>::initialized(cfg.architecture(), cfg.seed);
  AdamW opt(params.values.size(), cfg.beta1, cfg.beta2, cfg.adam_eps, cfg.weight_decay);

  TrainResult result{params, {}};
  result.log.class_weights = cfg.loss.class_weights;
  double best_val = std::numeric_limits<double>::infinity();
  const std::size_t n = train_set.rows.size();
  std::uint64_t global_step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cosine_lr(cfg.lr0, epoch, cfg.epochs);
    const auto order = shuffled_indices(n, cfg.seed, epoch);
    double loss_sum = 0.0;
    long batch_index = 0;
    for (std::size_t begin = 0; begin < n; begin += cfg.batch_size, ++batch_index, ++global_step) {
      const std::size_t end = std::min(n, begin + cfg.batch_size);
      const Mat xb = gather(x_train, order, begin, end);
      const Mat yb = gather(y_train, order, begin, end);
      const std::uint64_t dropout_seed = CounterRng::derive(cfg.seed, Stream::dropout, {global_step}).key();
      auto [pred, trace] = nn::forward(params, xb, true, dropout_seed);
      auto lg = loss_and_grad(cfg.loss, yb, pred);
      if (!std::isfinite(lg.loss))
        throw NonFiniteLoss(epoch, batch_index,
                            "non-finite training loss at epoch " + std::to_string(epoch) + ", batch " +
                                std::to_string(batch_index));
      loss_sum += lg.loss * static_cast<double>(end - begin);
      auto grads = nn::backward(params, trace, lg.grad);
      clip_global_norm(grads.values, cfg.clip_norm);
      double sq = 0.0;
      for (float g : grads.values) sq += static_cast<double>(g) * g;
      result.log.max_clipped_norm = std::max(result.log.max_clipped_norm, std::sqrt(sq));
      opt.step(params.values, grads.values, lr);
    }

    const Mat val_pred = nn::predict(params, x_val);
    const double val_loss = loss_and_grad(cfg.loss, y_val, val_pred).loss;
    if (!std::isfinite(val_loss))
      throw NonFiniteLoss(epoch, -1, "non-finite validation loss at epoch " + std::to_string(epoch));

    EpochRecord rec{epoch, loss_sum / static_cast<double>(n), val_loss, lr};
    result.log.epochs.push_back(rec);
    if (val_loss < best_val) {
      best_val = val_loss;
      result.log.best_epoch = epoch;
      result.params = params;
    }
    if (on_epoch) on_epoch(rec);
  }
  result.log.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<SeedOutcome> train_seed_sweep(const TrainConfig& base, std::span<const std::uint64_t> seeds,
                                          const DataSet& train_set, const DataSet& val_set,
                                          const EpochCallback& on_epoch) {
  std::vector<SeedOutcome> out;
  for (std::uint64_t seed : seeds) {
    TrainConfig cfg = base;
    cfg.seed = seed;
    SeedOutcome o;
    o.seed = seed;
    try {
      o.result = train(cfg, train_set, val_set, on_epoch);
    } catch (const Error& e) {
      o.error = e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

void save_train_log(const TrainLog& log, const std::filesystem::path& path) {
  Table t;
  t.columns = {"epoch", "train_loss", "val_loss", "lr"};
  for (const auto& e : log.epochs)
    t.add_row({std::to_string(e.epoch), format_number(e.train_loss), format_number(e.val_loss), format_number(e.lr)});
  write_csv(t, path);
}

}  // namespace primefam
