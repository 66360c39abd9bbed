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

#ifndef MIE_SEMANTIC_SPACE_HPP_
#define MIE_SEMANTIC_SPACE_HPP_

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mie/common.hpp"

namespace mie {

/// Squared Euclidean distance ||p - q||^2 between two vectors of equal size.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar squared_distance(const Eigen::MatrixBase<DerivedP>& p,
                                           const Eigen::MatrixBase<DerivedQ>& q) {
  require(p.size() == q.size(), "squared_distance: dimension mismatch (" +
                                    std::to_string(p.size()) + " vs " +
                                    std::to_string(q.size()) + ")");
  return (p - q).squaredNorm();
}

template <typename Scalar>
struct LabelRecord {
  std::string name;
  Vector<Scalar> vector;
};

/// A named label vocabulary whose semantic vectors all have unit norm.
///
/// Vectors are stored as the columns of a dim x size matrix in insertion
/// order; the column index is the label's vocabulary index everywhere else
/// in the toolkit. Instances are immutable once built.
template <typename Scalar = double>
class LabelSpace {
 public:
  LabelSpace() = default;

  Index dim() const { return vectors_.rows(); }
  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }

  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }

  /// dim x size, one unit column per label.
  const Matrix<Scalar>& vectors() const { return vectors_; }
  auto vector(std::size_t i) const { return vectors_.col(static_cast<Index>(i)); }

  std::optional<std::size_t> find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(std::string_view label) const {
    auto found = find(label);
    if (!found) throw Error("unknown label '" + std::string(label) + "'");
    return *found;
  }

  template <typename Other>
  LabelSpace<Other> cast() const {
    LabelSpace<Other> out;
    out.names_ = names_;
    out.index_ = index_;
    out.vectors_ = vectors_.template cast<Other>();
    return out;
  }

 private:
  template <typename>
  friend class LabelSpace;
  template <typename S>
  friend LabelSpace<S> load_label_space(std::span<const LabelRecord<S>> records);

  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
  Matrix<Scalar> vectors_;
};

/// Builds a label space, dividing each raw vector by its Euclidean norm.
template <typename Scalar>
LabelSpace<Scalar> load_label_space(std::span<const LabelRecord<Scalar>> records) {
  require(!records.empty(), "label space: no labels given");
  const Index dim = records.front().vector.size();
  require(dim >= 1, "label space: label '" + records.front().name + "' has an empty vector");

  LabelSpace<Scalar> space;
  space.vectors_.resize(dim, static_cast<Index>(records.size()));
  space.names_.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& record = records[i];
    require(!record.name.empty(), "label space: empty label name at position " + std::to_string(i));
    require(record.vector.size() == dim,
            "label space: label '" + record.name + "' has dimension " +
                std::to_string(record.vector.size()) + ", expected " + std::to_string(dim));
    require(record.vector.allFinite(), "label space: label '" + record.name + "' has non-finite entries");
    const Scalar norm = record.vector.norm();
    require(norm > Scalar(0), "label space: label '" + record.name + "' is the zero vector");
    require(space.index_.emplace(record.name, i).second,
            "label space: duplicate label '" + record.name + "'");
    space.names_.push_back(record.name);
    space.vectors_.col(static_cast<Index>(i)) = record.vector / norm;
  }
  return space;
}

template <typename Scalar>
LabelSpace<Scalar> load_label_space(const std::vector<LabelRecord<Scalar>>& records) {
  return load_label_space(std::span<const LabelRecord<Scalar>>(records));
}

/// Vocabulary indices ordered by ascending distance; equal distances keep
/// vocabulary order.
template <typename Derived>
std::vector<std::size_t> rank_by_distance(const Eigen::MatrixBase<Derived>& distances) {
  std::vector<std::size_t> order(static_cast<std::size_t>(distances.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return distances(static_cast<Index>(a)) < distances(static_cast<Index>(b));
  });
  return order;
}

/// Label names ordered by ascending distance, ties in vocabulary order.
template <typename Scalar>
std::vector<std::string> rank_labels_by_distance(const LabelSpace<Scalar>& space,
                                                 const std::map<std::string, Scalar>& per_label_distance) {
  Vector<Scalar> distances(static_cast<Index>(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i) {
    auto it = per_label_distance.find(space.name(i));
    require(it != per_label_distance.end(), "rank_labels_by_distance: no distance for label '" + space.name(i) + "'");
    distances(static_cast<Index>(i)) = it->second;
  }
  std::vector<std::string> ranked;
  ranked.reserve(space.size());
  for (std::size_t i : rank_by_distance(distances)) ranked.push_back(space.name(i));
  return ranked;
}

}  // namespace mie

#endif  // MIE_SEMANTIC_SPACE_HPP_
