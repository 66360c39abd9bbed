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

#ifndef MIE_BAGS_HPP_
#define MIE_BAGS_HPP_

#include <algorithm>
#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mie/common.hpp"

namespace mie {

/// Axis-aligned region in coordinates normalized to the image extent.
struct RegionGeometry {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;

  static constexpr RegionGeometry full_frame() { return {0.0, 0.0, 1.0, 1.0}; }

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool is_full_frame() const { return x0 == 0.0 && y0 == 0.0 && x1 == 1.0 && y1 == 1.0; }
  bool valid() const { return 0.0 <= x0 && x0 < x1 && x1 <= 1.0 && 0.0 <= y0 && y0 < y1 && y1 <= 1.0; }

  friend bool operator==(const RegionGeometry&, const RegionGeometry&) = default;
};

struct RegionFilter {
  double min_side = 0.3;
  double max_aspect = 4.0;
};

/// True iff both sides reach min_side and neither side exceeds max_aspect
/// times the other.
inline bool passes_region_filter(const RegionGeometry& g, const RegionFilter& filter = {}) {
  const double w = g.width();
  const double h = g.height();
  return w >= filter.min_side && h >= filter.min_side && w / h <= filter.max_aspect &&
         h / w <= filter.max_aspect;
}

/// All rectangles on the 4x4 cell grid whose sides span at least two cells.
/// Ordered row-major by top-left cell, then by height, then by width.
inline std::vector<RegionGeometry> grid_subregion_geometries() {
  constexpr int kCells = 4;
  constexpr int kMinSpan = 2;
  constexpr double kCell = 1.0 / kCells;
  std::vector<RegionGeometry> out;
  for (int row = 0; row + kMinSpan <= kCells; ++row)
    for (int col = 0; col + kMinSpan <= kCells; ++col)
      for (int h = kMinSpan; row + h <= kCells; ++h)
        for (int w = kMinSpan; col + w <= kCells; ++w)
          out.push_back({col * kCell, row * kCell, (col + w) * kCell, (row + h) * kCell});
  return out;
}

template <typename Scalar>
struct Region {
  Vector<Scalar> feature;
  RegionGeometry geometry;
};

/// One image as a bag of instances. Instance 0 is always the whole frame;
/// the remaining instances are subregions that passed the region filter.
template <typename Scalar = double>
class InstanceBag {
 public:
  InstanceBag() = default;

  const std::string& id() const { return id_; }
  Index feature_dim() const { return features_.rows(); }
  Index size() const { return features_.cols(); }

  /// feature_dim x size; column c is instance c.
  const Matrix<Scalar>& features() const { return features_; }
  auto feature(Index c) const { return features_.col(c); }
  const std::vector<RegionGeometry>& geometries() const { return geometries_; }
  const RegionGeometry& geometry(Index c) const { return geometries_.at(static_cast<std::size_t>(c)); }

  /// Ground-truth label names, duplicates removed, first occurrence kept.
  const std::vector<std::string>& labels() const { return labels_; }

  template <typename Other>
  InstanceBag<Other> cast() const {
    InstanceBag<Other> out;
    out.id_ = id_;
    out.features_ = features_.template cast<Other>();
    out.geometries_ = geometries_;
    out.labels_ = labels_;
    return out;
  }

 private:
  template <typename>
  friend class InstanceBag;
  template <typename S>
  friend InstanceBag<S> build_bag(std::string id, const Vector<S>& whole_image_feature,
                                  std::span<const Region<S>> regions, const RegionFilter& filter,
                                  std::vector<std::string> labels);

  std::string id_;
  Matrix<Scalar> features_;
  std::vector<RegionGeometry> geometries_;
  std::vector<std::string> labels_;
};

/// Builds a bag from the whole-image feature plus candidate regions.
/// Regions failing the filter are dropped; survivors keep input order.
template <typename Scalar>
InstanceBag<Scalar> build_bag(std::string id, const Vector<Scalar>& whole_image_feature,
                              std::span<const Region<Scalar>> regions, const RegionFilter& filter,
                              std::vector<std::string> labels) {
  const Index dim = whole_image_feature.size();
  require(dim >= 1, "bag '" + id + "': empty whole-image feature");
  std::vector<std::size_t> kept;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    require(regions[r].feature.size() == dim,
            "bag '" + id + "': region " + std::to_string(r) + " has feature dimension " +
                std::to_string(regions[r].feature.size()) + ", expected " + std::to_string(dim));
    require(regions[r].geometry.valid(), "bag '" + id + "': region " + std::to_string(r) + " has invalid geometry");
    if (passes_region_filter(regions[r].geometry, filter)) kept.push_back(r);
  }

  InstanceBag<Scalar> bag;
  bag.id_ = std::move(id);
  bag.features_.resize(dim, static_cast<Index>(kept.size() + 1));
  bag.features_.col(0) = whole_image_feature;
  bag.geometries_.reserve(kept.size() + 1);
  bag.geometries_.push_back(RegionGeometry::full_frame());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    bag.features_.col(static_cast<Index>(i + 1)) = regions[kept[i]].feature;
    bag.geometries_.push_back(regions[kept[i]].geometry);
  }
  for (auto& label : labels)
    if (std::find(bag.labels_.begin(), bag.labels_.end(), label) == bag.labels_.end())
      bag.labels_.push_back(std::move(label));
  return bag;
}

template <typename Scalar>
InstanceBag<Scalar> build_bag(std::string id, const Vector<Scalar>& whole_image_feature,
                              const std::vector<Region<Scalar>>& regions, const RegionFilter& filter = {},
                              std::vector<std::string> labels = {}) {
  return build_bag(std::move(id), whole_image_feature, std::span<const Region<Scalar>>(regions), filter,
                   std::move(labels));
}

/// The same bag restricted to its whole-image instance.
template <typename Scalar>
InstanceBag<Scalar> whole_image_view(const InstanceBag<Scalar>& bag) {
  return build_bag<Scalar>(bag.id(), bag.feature(0), std::vector<Region<Scalar>>{}, RegionFilter{}, bag.labels());
}

}  // namespace mie

#endif  // MIE_BAGS_HPP_
