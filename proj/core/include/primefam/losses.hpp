// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <string_view>

#include "primefam/dataset.hpp"
#include "primefam/network.hpp"

namespace primefam {

enum class LossKind { wbce, focal, asl };

std::string_view loss_name(LossKind kind) noexcept;
/// "wbce", "focal" or "asl"; throws InvalidArgument otherwise.
LossKind parse_loss(std::string_view text);

using ClassWeights = std::array<double, kFamilyCount>;

struct LossConfig {
  LossKind kind = LossKind::wbce;
  ClassWeights class_weights = {1, 1, 1, 1, 1, 1, 1};  // wbce: positive weight per family
  double alpha = 0.25;                                // focal
  double gamma = 2.0;                                 // focal
  double gamma_plus = 0.0;                            // asl
  double gamma_minus = 4.0;                           // asl
  double margin = 0.05;                               // asl
  double clamp_eps = 1e-7;

  /// Throws InvalidArgument when a weight is non-positive, margin is outside [0,1)
  /// or a focusing exponent is negative.
  void validate() const;
};

/// omega_k = negatives / positives per family. Throws DegenerateInput when some
/// family has no positives or no negatives.
ClassWeights class_weights_from(const DataSet& ds);

template <typename T>
struct LossResult {
  double loss = 0.0;     // mean over N*K elements
  nn::Matrix<T> grad;    // dL/dyhat, same shape as yhat
};

/// Mean-reduced multi-label loss and its gradient with respect to the
/// predictions. Predictions are clamped to [eps, 1-eps] first; clamped
/// entries get zero gradient. Throws DimensionMismatch on shape mismatch.
template <typename T>
LossResult<T> loss_and_grad(const LossConfig& cfg, const nn::Matrix<T>& y, const nn::Matrix<T>& yhat);

}  // namespace primefam
