// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "primefam/dataset.hpp"
#include "primefam/features.hpp"
#include "primefam/network.hpp"

namespace primefam {

/// One feature row per dataset row, optionally with one group zeroed.
template <typename T>
nn::Matrix<T> feature_matrix(const DataSet& ds, FeatureMode mode, std::optional<FeatureGroup> zeroed = std::nullopt,
                             unsigned threads = 1);

/// N x 7 matrix of 0/1 labels in family order.
template <typename T>
nn::Matrix<T> label_matrix(const DataSet& ds);

}  // namespace primefam
