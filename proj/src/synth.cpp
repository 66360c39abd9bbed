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

#include "mie/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace mie::synth {
namespace {

constexpr int kMaxAttempts = 10000;

Vector<double> random_unit(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector<double> v(dim);
  do {
    for (Index i = 0; i < dim; ++i) v(i) = normal(rng);
  } while (v.norm() == 0.0);
  return v.normalized();
}

bool far_from_all(const Vector<double>& v, const Matrix<double>& others, Index count) {
  for (Index c = 0; c < count; ++c)
    if ((others.col(c) - v).squaredNorm() < kMinLabelSeparation) return false;
  return true;
}

std::string numbered(const std::string& prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, i);
  return prefix + buf;
}

}  // namespace

void SynthConfig::validate() const {
  require(vocab_size >= 2, "synth: vocabulary needs at least two labels");
  require(semantic_dim >= 1 && feature_dim >= 1, "synth: dimensions must be positive");
  require(min_labels >= 1 && min_labels <= max_labels && max_labels < vocab_size,
          "synth: label range must satisfy 1 <= min <= max < vocabulary size");
  require(noise_sigma >= 0.0, "synth: noise sigma must be nonnegative");
  require(num_bags >= 1, "synth: need at least one bag");
  require(held_out_count() <= num_bags, "synth: more held-out bags than bags");
  require(max_labels + distractor_instances <= grid_subregion_geometries().size() - 1,
          "synth: too many instances per bag for the subregion grid");
}

World make_world(std::size_t vocab_size, std::size_t semantic_dim, std::size_t feature_dim, std::mt19937_64& rng) {
  const auto dim = static_cast<Index>(semantic_dim);
  Matrix<double> vectors(dim, static_cast<Index>(vocab_size));
  for (Index l = 0; l < vectors.cols(); ++l) {
    int attempt = 0;
    Vector<double> candidate;
    do {
      require(attempt++ < kMaxAttempts, "synth: cannot place " + std::to_string(vocab_size) +
                                            " separated labels in " + std::to_string(semantic_dim) +
                                            " dimensions; increase the semantic dimension");
      candidate = random_unit(dim, rng);
    } while (!far_from_all(candidate, vectors, l));
    vectors.col(l) = candidate;
  }

  std::vector<LabelRecord<double>> records;
  for (std::size_t l = 0; l < vocab_size; ++l)
    records.push_back({numbered("label_", l, 2), vectors.col(static_cast<Index>(l))});

  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix<double> generator(static_cast<Index>(feature_dim), dim);
  const Index full_rank = std::min<Index>(generator.rows(), generator.cols());
  do {
    for (Index c = 0; c < generator.cols(); ++c)
      for (Index r = 0; r < generator.rows(); ++r) generator(r, c) = normal(rng);
  } while (Eigen::ColPivHouseholderQR<Matrix<double>>(generator).rank() < full_rank);

  return {load_label_space(records), std::move(generator)};
}

Vector<double> random_far_direction(const Matrix<double>& avoid, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Vector<double> u = random_unit(avoid.rows(), rng);
    if (far_from_all(u, avoid, avoid.cols())) return u;
  }
  throw Error("synth: cannot find a distractor direction far from all labels; increase the semantic dimension");
}

std::vector<InstanceBag<double>> sample_bags(const World& world, std::span<const std::size_t> label_pool,
                                             std::size_t count, const BagSampling& sampling,
                                             const std::string& id_prefix, std::mt19937_64& rng) {
  require(sampling.min_labels >= 1 && sampling.min_labels <= sampling.max_labels &&
              sampling.max_labels <= label_pool.size(),
          "synth: label count range does not fit the label pool");
  const auto grid = grid_subregion_geometries();
  require(sampling.max_labels + sampling.distractor_instances <= grid.size() - 1,
          "synth: too many instances per bag for the subregion grid");

  std::uniform_int_distribution<std::size_t> label_count(sampling.min_labels, sampling.max_labels);
  std::normal_distribution<double> noise(0.0, sampling.noise_sigma > 0.0 ? sampling.noise_sigma : 1.0);
  const Index feature_dim = world.generator.rows();
  auto noisy = [&](const Vector<double>& direction) {
    Vector<double> f = world.generator * direction;
    if (sampling.noise_sigma > 0.0)
      for (Index i = 0; i < feature_dim; ++i) f(i) += noise(rng);
    return f;
  };

  std::vector<std::size_t> cells(grid.size());
  std::iota(cells.begin(), cells.end(), std::size_t{0});
  cells.erase(std::remove_if(cells.begin(), cells.end(), [&](std::size_t g) { return grid[g].is_full_frame(); }),
              cells.end());

  std::vector<InstanceBag<double>> bags;
  bags.reserve(count);
  for (std::size_t b = 0; b < count; ++b) {
    std::vector<std::size_t> chosen;
    std::sample(label_pool.begin(), label_pool.end(), std::back_inserter(chosen), label_count(rng), rng);
    std::shuffle(cells.begin(), cells.end(), rng);

    std::vector<Region<double>> regions;
    std::vector<std::string> labels;
    Vector<double> whole = Vector<double>::Zero(feature_dim);
    for (std::size_t l : chosen) {
      regions.push_back({noisy(world.space.vector(l)), grid[cells[regions.size()]]});
      whole += regions.back().feature;
      labels.push_back(world.space.name(l));
    }
    whole /= static_cast<double>(chosen.size());
    for (std::size_t d = 0; d < sampling.distractor_instances; ++d)
      regions.push_back({noisy(random_far_direction(world.space.vectors(), rng)), grid[cells[regions.size()]]});

    bags.push_back(build_bag<double>(numbered(id_prefix, b, 5), whole, regions, RegionFilter{}, labels));
  }
  return bags;
}

Dataset generate(const SynthConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  Dataset data;
  data.world = make_world(config.vocab_size, config.semantic_dim, config.feature_dim, rng);

  std::vector<std::size_t> pool(config.vocab_size);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  const BagSampling sampling{config.min_labels, config.max_labels, config.distractor_instances, config.noise_sigma};
  auto bags = sample_bags(data.world, pool, config.num_bags, sampling, "bag_", rng);

  std::vector<std::size_t> order(bags.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_train = bags.size() - config.held_out_count();
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::sort(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_train ? data.train : data.held_out).push_back(std::move(bags[order[i]]));
  return data;
}

}  // namespace mie::synth
