// Copyright 2026 The MIE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MIE_EMBEDDING_HPP_
#define MIE_EMBEDDING_HPP_

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mie/bags.hpp"
#include "mie/common.hpp"
#include "mie/semantic_space.hpp"

namespace mie {

/// Linear map from instance features into the semantic space, followed by
/// L2 normalization. There is no bias term.
template <typename Scalar = double>
class EmbeddingModel {
 public:
  EmbeddingModel() = default;

  /// weight is semantic_dim x feature_dim.
  explicit EmbeddingModel(Matrix<Scalar> weight) : weight_(std::move(weight)) {
    require(weight_.rows() >= 1 && weight_.cols() >= 1, "embedding model: empty weight matrix");
    require(weight_.allFinite(), "embedding model: weight contains non-finite values");
  }

  Index semantic_dim() const { return weight_.rows(); }
  Index feature_dim() const { return weight_.cols(); }

  const Matrix<Scalar>& weight() const { return weight_; }
  Matrix<Scalar>& weight() { return weight_; }

  template <typename Other>
  EmbeddingModel<Other> cast() const {
    return EmbeddingModel<Other>(weight_.template cast<Other>());
  }

 private:
  Matrix<Scalar> weight_;
};

/// Entries uniform in [-a, a] with a = sqrt(6 / (feature_dim + semantic_dim)).
template <typename Scalar = double, typename Rng>
EmbeddingModel<Scalar> initialize_model(Index feature_dim, Index semantic_dim, Rng& rng) {
  require(feature_dim >= 1 && semantic_dim >= 1, "initialize_model: dimensions must be positive");
  const double bound = std::sqrt(6.0 / static_cast<double>(feature_dim + semantic_dim));
  std::uniform_real_distribution<double> uniform(-bound, bound);
  Matrix<Scalar> weight(semantic_dim, feature_dim);
  // Column-major fill order is part of the reproducibility contract.
  for (Index c = 0; c < feature_dim; ++c)
    for (Index r = 0; r < semantic_dim; ++r) weight(r, c) = static_cast<Scalar>(uniform(rng));
  return EmbeddingModel<Scalar>(std::move(weight));
}

/// (W x) / ||W x||.
template <typename Scalar, typename Derived>
Vector<Scalar> embed_instance(const EmbeddingModel<Scalar>& model, const Eigen::MatrixBase<Derived>& feature) {
  require(feature.size() == model.feature_dim(),
          "embed_instance: feature dimension " + std::to_string(feature.size()) + " does not match model input " +
              std::to_string(model.feature_dim()));
  Vector<Scalar> projected = model.weight() * feature;
  const Scalar norm = projected.norm();
  require(norm > Scalar(0), "embed_instance: projection is the zero vector");
  return projected / norm;
}

/// Every instance of a bag pushed through the model.
template <typename Scalar>
struct BagEmbedding {
  Matrix<Scalar> projected;  // W X, before normalization
  Vector<Scalar> norms;      // column norms of projected
  Matrix<Scalar> unit;       // normalized columns
};

template <typename Scalar>
BagEmbedding<Scalar> embed_bag(const EmbeddingModel<Scalar>& model, const InstanceBag<Scalar>& bag) {
  require(bag.feature_dim() == model.feature_dim(),
          "bag '" + bag.id() + "': feature dimension " + std::to_string(bag.feature_dim()) +
              " does not match model input " + std::to_string(model.feature_dim()));
  BagEmbedding<Scalar> out;
  out.projected = model.weight() * bag.features();
  out.norms = out.projected.colwise().norm().transpose();
  for (Index c = 0; c < bag.size(); ++c)
    require(out.norms(c) > Scalar(0),
            "bag '" + bag.id() + "', instance " + std::to_string(c) + ": projection is the zero vector");
  out.unit = out.projected.array().rowwise() / out.norms.transpose().array();
  return out;
}

template <typename Scalar>
struct BagDistance {
  Scalar distance;
  Index argmin_index;
};

/// min over instances of the squared distance to label_vec; ties go to the
/// lowest instance index.
template <typename Scalar, typename Derived>
BagDistance<Scalar> min_instance_distance(const Matrix<Scalar>& unit_instances,
                                          const Eigen::MatrixBase<Derived>& label_vec) {
  require(label_vec.size() == unit_instances.rows(),
          "label vector dimension " + std::to_string(label_vec.size()) + " does not match embedding dimension " +
              std::to_string(unit_instances.rows()));
  BagDistance<Scalar> best{squared_distance(unit_instances.col(0), label_vec), 0};
  for (Index c = 1; c < unit_instances.cols(); ++c) {
    const Scalar d = squared_distance(unit_instances.col(c), label_vec);
    if (d < best.distance) best = {d, c};
  }
  return best;
}

template <typename Scalar, typename Derived>
BagDistance<Scalar> bag_label_distance(const EmbeddingModel<Scalar>& model, const InstanceBag<Scalar>& bag,
                                       const Eigen::MatrixBase<Derived>& label_vec) {
  return min_instance_distance(embed_bag(model, bag).unit, label_vec);
}

/// Bag distance and argmin instance for every vocabulary label.
template <typename Scalar>
struct LabelDistances {
  Vector<Scalar> distance;
  std::vector<Index> argmin;
};

template <typename Scalar>
LabelDistances<Scalar> label_distances(const Matrix<Scalar>& unit_instances, const LabelSpace<Scalar>& space) {
  require(space.dim() == unit_instances.rows(),
          "label space dimension " + std::to_string(space.dim()) + " does not match embedding dimension " +
              std::to_string(unit_instances.rows()));
  LabelDistances<Scalar> out;
  out.distance.resize(static_cast<Index>(space.size()));
  out.argmin.resize(space.size());
  for (std::size_t t = 0; t < space.size(); ++t) {
    const auto best = min_instance_distance(unit_instances, space.vector(t));
    out.distance(static_cast<Index>(t)) = best.distance;
    out.argmin[t] = best.argmin_index;
  }
  return out;
}

}  // namespace mie

#endif  // MIE_EMBEDDING_HPP_
