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

#ifndef MIE_SYNTH_HPP_
#define MIE_SYNTH_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mie/bags.hpp"
#include "mie/common.hpp"
#include "mie/semantic_space.hpp"

namespace mie::synth {

struct SynthConfig {
  std::size_t vocab_size = 12;
  std::size_t semantic_dim = 8;
  std::size_t feature_dim = 32;
  std::size_t min_labels = 2;
  std::size_t max_labels = 3;
  std::size_t distractor_instances = 2;
  double noise_sigma = 0.02;
  std::size_t num_bags = 2200;
  // Defaults to num_bags / 10.
  std::optional<std::size_t> held_out_bags;
  std::uint64_t seed = 0;

  std::size_t held_out_count() const { return held_out_bags.value_or(num_bags / 10); }
  void validate() const;
};

/// Minimum pairwise squared distance between generated label vectors; also
/// the minimum squared distance between a distractor direction and every label.
inline constexpr double kMinLabelSeparation = 0.5;

/// Label space plus the hidden feature_dim x semantic_dim generator G.
/// A label instance for y has feature G y + noise.
struct World {
  LabelSpace<double> space;
  Matrix<double> generator;
};

struct BagSampling {
  std::size_t min_labels = 1;
  std::size_t max_labels = 1;
  std::size_t distractor_instances = 0;
  double noise_sigma = 0.0;
};

struct Dataset {
  World world;
  std::vector<InstanceBag<double>> train;
  std::vector<InstanceBag<double>> held_out;
};

/// Unit label vectors named label_00, label_01, ..., resampled until pairwise
/// separated, and a full-rank Gaussian generator.
World make_world(std::size_t vocab_size, std::size_t semantic_dim, std::size_t feature_dim, std::mt19937_64& rng);

/// Unit vector at squared distance >= kMinLabelSeparation from every column
/// of `avoid`.
Vector<double> random_far_direction(const Matrix<double>& avoid, std::mt19937_64& rng);

/// `count` bags whose labels are drawn from `label_pool` (vocabulary
/// indices). Each label yields one instance; distractors come from
/// directions far from every label; instance 0 is the mean of the label
/// instances. Geometries are distinct cells of the 4x4 subregion grid.
std::vector<InstanceBag<double>> sample_bags(const World& world, std::span<const std::size_t> label_pool,
                                             std::size_t count, const BagSampling& sampling,
                                             const std::string& id_prefix, std::mt19937_64& rng);

/// Whole dataset with a seeded train / held-out split.
Dataset generate(const SynthConfig& config);

}  // namespace mie::synth

#endif  // MIE_SYNTH_HPP_
