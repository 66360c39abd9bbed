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

#ifndef MIE_INFERENCE_HPP_
#define MIE_INFERENCE_HPP_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mie/bags.hpp"
#include "mie/common.hpp"
#include "mie/embedding.hpp"
#include "mie/semantic_space.hpp"
#include "mie/trainer.hpp"

namespace mie {

struct PredictionEntry {
  std::string label;
  double distance;
  Index instance;  // argmin instance supporting the label
  RegionGeometry geometry;
};

/// Labels of one bag in rank order, each localized to its closest instance.
struct PredictionList {
  std::string bag_id;
  std::vector<PredictionEntry> entries;

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.label);
    return out;
  }
};

/// Top-k labels by min-over-instances distance.
template <typename Scalar>
PredictionList predict(const EmbeddingModel<Scalar>& model, const InstanceBag<Scalar>& bag,
                       const LabelSpace<Scalar>& space, std::size_t k) {
  require(k >= 1 && k <= space.size(), "predict: k = " + std::to_string(k) + " must lie in [1, " +
                                           std::to_string(space.size()) + "]");
  require(space.dim() == model.semantic_dim(), "predict: label space dimension " + std::to_string(space.dim()) +
                                                   " does not match model output " +
                                                   std::to_string(model.semantic_dim()));
  const auto distances = label_distances(embed_bag(model, bag).unit, space);
  const auto order = rank_by_distance(distances.distance);

  PredictionList out;
  out.bag_id = bag.id();
  out.entries.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t t = order[r];
    const Index c = distances.argmin[t];
    out.entries.push_back(
        {space.name(t), static_cast<double>(distances.distance(static_cast<Index>(t))), c, bag.geometry(c)});
  }
  return out;
}

template <typename Scalar, typename Derived>
std::pair<Index, RegionGeometry> localize_label(const EmbeddingModel<Scalar>& model, const InstanceBag<Scalar>& bag,
                                                const Eigen::MatrixBase<Derived>& label_vec) {
  const auto best = bag_label_distance(model, bag, label_vec);
  return {best.argmin_index, bag.geometry(best.argmin_index)};
}

/// predict over a vocabulary the model never saw during training.
template <typename Scalar>
PredictionList zero_shot_predict(const EmbeddingModel<Scalar>& model, const InstanceBag<Scalar>& bag,
                                 const LabelSpace<Scalar>& unseen_space, std::size_t k) {
  require(unseen_space.dim() == model.semantic_dim(),
          "zero_shot_predict: unseen label dimension " + std::to_string(unseen_space.dim()) +
              " does not match model output " + std::to_string(model.semantic_dim()));
  return predict(model, bag, unseen_space, k);
}

/// predict for every bag, split across `jobs` workers; output in bag order.
template <typename Scalar>
std::vector<PredictionList> predict_all(const EmbeddingModel<Scalar>& model,
                                        std::span<const InstanceBag<Scalar>> bags, const LabelSpace<Scalar>& space,
                                        std::size_t k, std::size_t jobs = 1) {
  std::vector<PredictionList> out(bags.size());
  detail::parallel_chunks(bags.size(), jobs, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) out[i] = predict(model, bags[i], space, k);
  });
  return out;
}

}  // namespace mie

#endif  // MIE_INFERENCE_HPP_
