// SPDX-License-Identifier: Apache-2.0
#include "primefam/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "primefam/error.hpp"

namespace primefam {
namespace {

// Loss of one element and its derivative with respect to the clamped prediction q.
struct Term {
  double loss;
  double dq;
};

// x^e with the conventions 0^0 = 1 and e == 0 -> 1 for any x.
double power(double x, double e) { return e == 0.0 ? 1.0 : std::pow(x, e); }

Term wbce_term(double y, double q, double omega) {
  const double w = y > 0.5 ? omega : 1.0;
  if (y > 0.5) return {-w * std::log(q), -w / q};
  return {-w * std::log1p(-q), w / (1.0 - q)};
}

Term focal_term(double y, double q, double alpha, double gamma) {
  const bool pos = y > 0.5;
  const double pt = pos ? q : 1.0 - q;
  const double ce = -std::log(pt);
  const double mod = power(1.0 - pt, gamma);
  double dpt = -mod / pt;
  if (gamma != 0.0) dpt -= gamma * power(1.0 - pt, gamma - 1.0) * ce;
  return {alpha * mod * ce, alpha * dpt * (pos ? 1.0 : -1.0)};
}

Term asl_term(double y, double q, double gamma_plus, double gamma_minus, double margin) {
  if (y > 0.5) {
    const double lq = std::log(q);
    double dq = -power(1.0 - q, gamma_plus) / q;
    if (gamma_plus != 0.0) dq += gamma_plus * power(1.0 - q, gamma_plus - 1.0) * lq;
    return {-power(1.0 - q, gamma_plus) * lq, dq};
  }
  const double s = q - margin;
  if (s <= 0.0) return {0.0, 0.0};  // zero subgradient at and below the margin
  const double l1s = std::log1p(-s);
  double dq = power(s, gamma_minus) / (1.0 - s);
  if (gamma_minus != 0.0) dq -= gamma_minus * power(s, gamma_minus - 1.0) * l1s;
  return {-power(s, gamma_minus) * l1s, dq};
}

}  // namespace

std::string_view loss_name(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::wbce: return "wbce";
    case LossKind::focal: return "focal";
    case LossKind::asl: return "asl";
  }
  return "?";
}

LossKind parse_loss(std::string_view text) {
  if (text == "wbce") return LossKind::wbce;
  if (text == "focal") return LossKind::focal;
  if (text == "asl") return LossKind::asl;
  throw InvalidArgument("unknown loss '" + std::string(text) + "' (expected wbce, focal or asl)");
}

void LossConfig::validate() const {
  for (double w : class_weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("LossConfig: class weights must be positive");
  if (!(margin >= 0.0 && margin < 1.0)) throw InvalidArgument("LossConfig: margin must lie in [0, 1)");
  if (gamma < 0.0 || gamma_plus < 0.0 || gamma_minus < 0.0)
    throw InvalidArgument("LossConfig: focusing exponents must be >= 0");
  if (!(clamp_eps > 0.0 && clamp_eps < 0.5)) throw InvalidArgument("LossConfig: clamp epsilon must lie in (0, 0.5)");
}

ClassWeights class_weights_from(const DataSet& ds) {
  std::array<std::size_t, kFamilyCount> pos{};
  for (const DataRow& r : ds.rows)
    for (std::size_t k = 0; k < kFamilyCount; ++k) pos[k] += r.labels[kFamilies[k]] ? 1 : 0;
  ClassWeights w{};
  for (std::size_t k = 0; k < kFamilyCount; ++k) {
    const std::size_t neg = ds.rows.size() - pos[k];
    if (pos[k] == 0 || neg == 0)
      throw DegenerateInput("class_weights_from: family '" + std::string(family_name(kFamilies[k])) +
                            "' has no " + (pos[k] == 0 ? "positives" : "negatives"));
    w[k] = static_cast<double>(neg) / static_cast<double>(pos[k]);
  }
  return w;
}

template <typename T>
LossResult<T> loss_and_grad(const LossConfig& cfg, const nn::Matrix<T>& y, const nn::Matrix<T>& yhat) {
  if (y.rows() != yhat.rows() || y.cols() != yhat.cols())
    throw DimensionMismatch("loss_and_grad: labels " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()) +
                            " vs predictions " + std::to_string(yhat.rows()) + "x" + std::to_string(yhat.cols()));
  if (cfg.kind == LossKind::wbce && static_cast<std::size_t>(y.cols()) > kFamilyCount)
    throw DimensionMismatch("loss_and_grad: wbce has weights for at most " + std::to_string(kFamilyCount) +
                            " columns");

  const double lo = cfg.clamp_eps;
  const double hi = 1.0 - cfg.clamp_eps;
  const double scale = 1.0 / static_cast<double>(y.rows() * y.cols());

  LossResult<T> out;
  out.grad.resize(y.rows(), y.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index k = 0; k < y.cols(); ++k) {
      const double raw = static_cast<double>(yhat(i, k));
      const double q = std::clamp(raw, lo, hi);
      const double t = static_cast<double>(y(i, k));
      Term term{};
      switch (cfg.kind) {
        case LossKind::wbce: term = wbce_term(t, q, cfg.class_weights[static_cast<std::size_t>(k)]); break;
        case LossKind::focal: term = focal_term(t, q, cfg.alpha, cfg.gamma); break;
        case LossKind::asl: term = asl_term(t, q, cfg.gamma_plus, cfg.gamma_minus, cfg.margin); break;
      }
      total += term.loss;
      const bool clamped = raw < lo || raw > hi;
      out.grad(i, k) = clamped ? T(0) : static_cast<T>(term.dq * scale);
    }
  }
  out.loss = total * scale;
  return out;
}

template LossResult<float> loss_and_grad(const LossConfig&, const nn::Matrix<float>&, const nn::Matrix<float>&);
template LossResult<double> loss_and_grad(const LossConfig&, const nn::Matrix<double>&, const nn::Matrix<double>&);

}  // namespace primefam
