// SPDX-License-Identifier: Apache-2.0
#include "primefam/tensors.hpp"

#include "primefam/parallel.hpp"

namespace primefam {

template <typename T>
nn::Matrix<T> feature_matrix(const DataSet& ds, FeatureMode mode, std::optional<FeatureGroup> zeroed, unsigned threads) {
  const auto dim = static_cast<Eigen::Index>(feature_dim(mode));
  nn::Matrix<T> x(static_cast<Eigen::Index>(ds.rows.size()), dim);
  parallel_for(ds.rows.size(), threads, [&](std::size_t i) {
    FeatureVector v = make_features(ds.rows[i].ctx, mode);
    if (zeroed) v = zero_group(v, *zeroed);
    for (Eigen::Index j = 0; j < dim; ++j) x(static_cast<Eigen::Index>(i), j) = static_cast<T>(v.values[j]);
  });
  return x;
}

template <typename T>
nn::Matrix<T> label_matrix(const DataSet& ds) {
  nn::Matrix<T> y(static_cast<Eigen::Index>(ds.rows.size()), static_cast<Eigen::Index>(kFamilyCount));
  for (std::size_t i = 0; i < ds.rows.size(); ++i)
    for (std::size_t k = 0; k < kFamilyCount; ++k)
      y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = ds.rows[i].labels[kFamilies[k]] ? T(1) : T(0);
  return y;
}

template nn::Matrix<float> feature_matrix(const DataSet&, FeatureMode, std::optional<FeatureGroup>, unsigned);
template nn::Matrix<double> feature_matrix(const DataSet&, FeatureMode, std::optional<FeatureGroup>, unsigned);
template nn::Matrix<float> label_matrix(const DataSet&);
template nn::Matrix<double> label_matrix(const DataSet&);

}  // namespace primefam
