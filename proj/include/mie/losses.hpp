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

#ifndef MIE_LOSSES_HPP_
#define MIE_LOSSES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mie/bags.hpp"
#include "mie/common.hpp"
#include "mie/embedding.hpp"
#include "mie/semantic_space.hpp"

namespace mie {

enum class LossKind {
  whole_image_ranking,  // pairwise hinge ranking on the whole-image instance
  mie,                  // hinge ranking on min-over-instances distances
  mie_rank_weighted,    // mie with each positive's terms scaled by w(rank)
};

/// CLI spelling: rank, mie, mie-warp.
inline std::string_view loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::whole_image_ranking: return "rank";
    case LossKind::mie: return "mie";
    case LossKind::mie_rank_weighted: return "mie-warp";
  }
  return "?";
}

inline LossKind parse_loss_kind(std::string_view name) {
  if (name == "rank") return LossKind::whole_image_ranking;
  if (name == "mie") return LossKind::mie;
  if (name == "mie-warp") return LossKind::mie_rank_weighted;
  throw Error("unknown loss '" + std::string(name) + "' (expected rank, mie or mie-warp)");
}

struct LossConfig {
  LossKind kind = LossKind::mie_rank_weighted;
  double margin = 0.1;
  // Max negatives sampled (uniformly, without replacement) per positive.
  std::optional<std::size_t> negative_cap;
  // Count only non-positive labels when ranking a positive.
  bool rank_excludes_positives = false;
  // Test hook: every rank weight is 1.
  bool force_unit_weights = false;

  void validate() const {
    require(std::isfinite(margin) && margin > 0.0, "loss: margin must be positive");
    require(!negative_cap || *negative_cap >= 1, "loss: negative cap must be at least 1");
  }
};

template <typename Scalar>
struct LossValueGrad {
  Scalar value = Scalar(0);
  Matrix<Scalar> grad;  // shaped like the model weight
};

using LossRng = std::mt19937_64;

/// w(r): 1 while the positive sits inside the top num_positives, r beyond.
inline double rank_weight(std::size_t rank, std::size_t num_positives) {
  return rank < num_positives ? 1.0 : static_cast<double>(rank);
}

/// Number of labels t != j whose distance is <= the distance of j.
template <typename Scalar>
std::size_t label_rank(const Vector<Scalar>& distances, std::size_t j,
                       std::span<const std::size_t> excluded = {}) {
  const Scalar dj = distances(static_cast<Index>(j));
  std::size_t rank = 0;
  for (Index t = 0; t < distances.size(); ++t) {
    const auto tu = static_cast<std::size_t>(t);
    if (tu == j || std::find(excluded.begin(), excluded.end(), tu) != excluded.end()) continue;
    if (distances(t) <= dj) ++rank;
  }
  return rank;
}

template <typename Scalar>
std::size_t label_rank(const EmbeddingModel<Scalar>& model, const InstanceBag<Scalar>& bag,
                       const LabelSpace<Scalar>& space, std::string_view label) {
  const std::size_t j = space.index_of(label);
  return label_rank(label_distances(embed_bag(model, bag).unit, space).distance, j);
}

namespace detail {

template <typename Scalar>
std::vector<std::size_t> positive_indices(const LabelSpace<Scalar>& space, std::span<const std::string> positives) {
  require(!positives.empty(), "loss: no positive labels");
  std::vector<std::size_t> out;
  for (const auto& name : positives) {
    auto found = space.find(name);
    require(found.has_value(), "loss: positive label '" + name + "' is not in the label space");
    if (std::find(out.begin(), out.end(), *found) == out.end()) out.push_back(*found);
  }
  require(out.size() < space.size(), "loss: every vocabulary label is positive, no negatives remain");
  return out;
}

// Everything a pairwise ranking loss needs about one bag and one label set.
template <typename Scalar>
struct RankingTerms {
  BagEmbedding<Scalar> embedding;
  Matrix<Scalar> instances;  // features of the instances in play
  LabelDistances<Scalar> distances;
  std::vector<std::size_t> positives;
  std::vector<double> weights;                     // per positive
  std::vector<std::vector<std::size_t>> negatives;  // per positive
};

template <typename Scalar>
RankingTerms<Scalar> ranking_terms(const EmbeddingModel<Scalar>& model, const InstanceBag<Scalar>& bag,
                                   const LabelSpace<Scalar>& space, std::span<const std::string> positives,
                                   const LossConfig& config, LossRng* rng) {
  config.validate();
  RankingTerms<Scalar> terms;
  terms.positives = positive_indices(space, positives);
  require(space.dim() == model.semantic_dim(), "loss: label space dimension " + std::to_string(space.dim()) +
                                                   " does not match model output " +
                                                   std::to_string(model.semantic_dim()));

  if (config.kind == LossKind::whole_image_ranking) {
    terms.instances = bag.features().leftCols(1);
    terms.embedding = embed_bag(model, whole_image_view(bag));
  } else {
    terms.instances = bag.features();
    terms.embedding = embed_bag(model, bag);
  }
  terms.distances = label_distances(terms.embedding.unit, space);

  const std::size_t num_pos = terms.positives.size();
  std::vector<std::size_t> all_negatives;
  for (std::size_t t = 0; t < space.size(); ++t)
    if (std::find(terms.positives.begin(), terms.positives.end(), t) == terms.positives.end())
      all_negatives.push_back(t);

  const std::span<const std::size_t> excluded =
      config.rank_excludes_positives ? std::span<const std::size_t>(terms.positives) : std::span<const std::size_t>();
  for (std::size_t j : terms.positives) {
    double w = 1.0;
    if (config.kind == LossKind::mie_rank_weighted && !config.force_unit_weights)
      w = rank_weight(label_rank(terms.distances.distance, j, excluded), num_pos);
    terms.weights.push_back(w);

    if (config.negative_cap && *config.negative_cap < all_negatives.size()) {
      require(rng != nullptr, "loss: negative sampling requires a random generator");
      std::vector<std::size_t> sampled;
      std::sample(all_negatives.begin(), all_negatives.end(), std::back_inserter(sampled), *config.negative_cap,
                  *rng);
      terms.negatives.push_back(std::move(sampled));
    } else {
      terms.negatives.push_back(all_negatives);
    }
  }
  return terms;
}

}  // namespace detail

/// Value and subgradient of the configured ranking loss for one bag.
///
/// Each active hinge m + d_j - d_k > 0 contributes w_j to label j and -w_j to
/// label k. A label's distance is differentiated at its argmin instance, and
/// for D = ||u - y||^2 with u = e / ||e||, e = W x:
///   dD/de = 2 ((u - y) - u <u, u - y>) / ||e||,   dD/dW = dD/de x^T.
template <typename Scalar>
LossValueGrad<Scalar> evaluate_loss(const EmbeddingModel<Scalar>& model, const InstanceBag<Scalar>& bag,
                                    const LabelSpace<Scalar>& space, std::span<const std::string> positives,
                                    const LossConfig& config, LossRng* rng = nullptr) {
  auto terms = detail::ranking_terms(model, bag, space, positives, config, rng);
  const auto& d = terms.distances.distance;
  const Scalar margin = static_cast<Scalar>(config.margin);

  LossValueGrad<Scalar> out;
  Vector<Scalar> coefficient = Vector<Scalar>::Zero(static_cast<Index>(space.size()));
  for (std::size_t p = 0; p < terms.positives.size(); ++p) {
    const auto j = static_cast<Index>(terms.positives[p]);
    const auto w = static_cast<Scalar>(terms.weights[p]);
    for (std::size_t k_label : terms.negatives[p]) {
      const auto k = static_cast<Index>(k_label);
      const Scalar hinge = margin + d(j) - d(k);
      if (hinge > Scalar(0)) {
        out.value += w * hinge;
        coefficient(j) += w;
        coefficient(k) -= w;
      }
    }
  }

  const auto& emb = terms.embedding;
  Matrix<Scalar> grad_projected = Matrix<Scalar>::Zero(emb.unit.rows(), emb.unit.cols());
  for (Index t = 0; t < coefficient.size(); ++t) {
    if (coefficient(t) == Scalar(0)) continue;
    const Index c = terms.distances.argmin[static_cast<std::size_t>(t)];
    const auto u = emb.unit.col(c);
    const Vector<Scalar> diff = u - space.vector(static_cast<std::size_t>(t));
    grad_projected.col(c) += coefficient(t) * Scalar(2) * (diff - u * u.dot(diff)) / emb.norms(c);
  }
  out.grad = grad_projected * terms.instances.transpose();
  return out;
}

template <typename Scalar>
LossValueGrad<Scalar> evaluate_loss(const EmbeddingModel<Scalar>& model, const InstanceBag<Scalar>& bag,
                                    const LabelSpace<Scalar>& space, const std::vector<std::string>& positives,
                                    const LossConfig& config, LossRng* rng = nullptr) {
  return evaluate_loss(model, bag, space, std::span<const std::string>(positives), config, rng);
}

template <typename Scalar>
LossValueGrad<Scalar> whole_image_ranking_loss(const EmbeddingModel<Scalar>& model, const InstanceBag<Scalar>& bag,
                                               const LabelSpace<Scalar>& space,
                                               std::span<const std::string> positives, LossConfig config,
                                               LossRng* rng = nullptr) {
  config.kind = LossKind::whole_image_ranking;
  return evaluate_loss(model, bag, space, positives, config, rng);
}

template <typename Scalar>
LossValueGrad<Scalar> mie_loss(const EmbeddingModel<Scalar>& model, const InstanceBag<Scalar>& bag,
                               const LabelSpace<Scalar>& space, std::span<const std::string> positives,
                               LossConfig config, LossRng* rng = nullptr) {
  config.kind = LossKind::mie;
  return evaluate_loss(model, bag, space, positives, config, rng);
}

template <typename Scalar>
LossValueGrad<Scalar> mie_rank_weighted_loss(const EmbeddingModel<Scalar>& model, const InstanceBag<Scalar>& bag,
                                             const LabelSpace<Scalar>& space,
                                             std::span<const std::string> positives, LossConfig config,
                                             LossRng* rng = nullptr) {
  config.kind = LossKind::mie_rank_weighted;
  return evaluate_loss(model, bag, space, positives, config, rng);
}

/// Distance from the current point to the nearest kink of the loss: the
/// smallest of |hinge| over evaluated pairs, the gap between the best and
/// second-best instance for every label in play, and (rank-weighted only)
/// the gap between each positive's distance and every other label's.
/// Gradient checks are meaningful only where this is comfortably positive.
template <typename Scalar>
Scalar loss_genericity_gap(const EmbeddingModel<Scalar>& model, const InstanceBag<Scalar>& bag,
                           const LabelSpace<Scalar>& space, std::span<const std::string> positives,
                           const LossConfig& config, LossRng* rng = nullptr) {
  auto terms = detail::ranking_terms(model, bag, space, positives, config, rng);
  const auto& d = terms.distances.distance;
  const Scalar margin = static_cast<Scalar>(config.margin);
  Scalar gap = std::numeric_limits<Scalar>::infinity();

  std::vector<bool> in_play(space.size(), false);
  for (std::size_t p = 0; p < terms.positives.size(); ++p) {
    const std::size_t j = terms.positives[p];
    in_play[j] = true;
    for (std::size_t k : terms.negatives[p]) {
      in_play[k] = true;
      gap = std::min(gap, Scalar(std::abs(margin + d(static_cast<Index>(j)) - d(static_cast<Index>(k)))));
    }
    if (config.kind == LossKind::mie_rank_weighted && !config.force_unit_weights)
      for (Index t = 0; t < d.size(); ++t)
        if (static_cast<std::size_t>(t) != j) gap = std::min(gap, Scalar(std::abs(d(t) - d(static_cast<Index>(j)))));
  }

  const auto& unit = terms.embedding.unit;
  if (unit.cols() > 1) {
    for (std::size_t t = 0; t < space.size(); ++t) {
      if (!in_play[t]) continue;
      const Index best = terms.distances.argmin[t];
      const auto y = space.vector(t);
      for (Index c = 0; c < unit.cols(); ++c)
        if (c != best) gap = std::min(gap, Scalar(squared_distance(unit.col(c), y) - d(static_cast<Index>(t))));
    }
  }
  return gap;
}

}  // namespace mie

#endif  // MIE_LOSSES_HPP_
