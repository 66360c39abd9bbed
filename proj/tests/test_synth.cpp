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

#include <set>

#include "doctest.h"
#include "mie/losses.hpp"
#include "mie/synth.hpp"

using namespace mie;

namespace {

bool same_bags(const std::vector<InstanceBag<double>>& a, const std::vector<InstanceBag<double>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].id() != b[i].id() || a[i].features() != b[i].features() || a[i].geometries() != b[i].geometries() ||
        a[i].labels() != b[i].labels())
      return false;
  return true;
}

}  // namespace

TEST_CASE("generate is deterministic and splits 90/10") {
  synth::SynthConfig config;
  config.num_bags = 300;
  config.seed = 11;
  const auto a = synth::generate(config);
  const auto b = synth::generate(config);
  CHECK(a.world.space.vectors() == b.world.space.vectors());
  CHECK(a.world.generator == b.world.generator);
  CHECK(same_bags(a.train, b.train));
  CHECK(same_bags(a.held_out, b.held_out));
  CHECK(a.train.size() == 270);
  CHECK(a.held_out.size() == 30);

  std::set<std::string> ids;
  for (const auto& bag : a.train) ids.insert(bag.id());
  for (const auto& bag : a.held_out) ids.insert(bag.id());
  CHECK(ids.size() == 300);

  config.seed = 12;
  CHECK(synth::generate(config).world.generator != a.world.generator);
}

TEST_CASE("world and bag structure") {
  synth::SynthConfig config;
  config.num_bags = 200;
  config.seed = 3;
  config.min_labels = 1;
  config.max_labels = 4;
  config.distractor_instances = 3;
  const auto data = synth::generate(config);
  const auto& space = data.world.space;

  CHECK(space.size() == 12);
  CHECK(space.dim() == 8);
  CHECK(space.name(0) == "label_00");
  CHECK(space.name(11) == "label_11");
  for (std::size_t i = 0; i < space.size(); ++i) {
    CHECK(space.vector(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t j = i + 1; j < space.size(); ++j)
      CHECK(squared_distance(space.vector(i), space.vector(j)) >= synth::kMinLabelSeparation);
  }
  CHECK(data.world.generator.rows() == 32);
  CHECK(data.world.generator.cols() == 8);
  CHECK(Eigen::ColPivHouseholderQR<Matrix<double>>(data.world.generator).rank() == 8);

  for (const auto& bag : data.train) {
    const auto n_labels = bag.labels().size();
    CHECK(n_labels >= 1);
    CHECK(n_labels <= 4);
    CHECK(static_cast<std::size_t>(bag.size()) == 1 + n_labels + 3);
    CHECK(bag.geometry(0).is_full_frame());
    std::set<std::pair<double, double>> corners;
    for (Index c = 1; c < bag.size(); ++c) {
      CHECK(passes_region_filter(bag.geometry(c)));
      CHECK_FALSE(bag.geometry(c).is_full_frame());
      corners.insert({bag.geometry(c).x0 * 10 + bag.geometry(c).x1, bag.geometry(c).y0 * 10 + bag.geometry(c).y1});
    }
    CHECK(corners.size() == static_cast<std::size_t>(bag.size() - 1));
    Vector<double> mean = Vector<double>::Zero(32);
    for (std::size_t l = 0; l < n_labels; ++l) mean += bag.feature(static_cast<Index>(1 + l));
    mean /= static_cast<double>(n_labels);
    CHECK((mean - bag.feature(0)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("labels name exactly the emitting directions when noise is zero") {
  std::mt19937_64 rng(4);
  const auto world = synth::make_world(10, 6, 20, rng);
  const std::vector<std::size_t> pool{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto bags = synth::sample_bags(world, pool, 50, {2, 3, 2, 0.0}, "b", rng);
  const Matrix<double> pinv = world.generator.completeOrthogonalDecomposition().pseudoInverse();
  for (const auto& bag : bags) {
    const auto& labels = bag.labels();
    for (std::size_t l = 0; l < labels.size(); ++l) {
      const Vector<double> recovered = pinv * bag.feature(static_cast<Index>(1 + l));
      CHECK((recovered - world.space.vector(world.space.index_of(labels[l]))).norm() <= 1e-9);
    }
    for (Index c = static_cast<Index>(1 + labels.size()); c < bag.size(); ++c) {
      const Vector<double> direction = pinv * bag.feature(c);
      CHECK(direction.norm() == doctest::Approx(1.0).epsilon(1e-9));
      for (std::size_t t = 0; t < world.space.size(); ++t)
        CHECK(squared_distance(direction, world.space.vector(t)) >= synth::kMinLabelSeparation - 1e-9);
    }
  }
}

TEST_CASE("pseudoinverse model reaches zero loss on clean single-label bags") {
  synth::SynthConfig config;
  config.num_bags = 100;
  config.min_labels = 1;
  config.max_labels = 1;
  config.distractor_instances = 0;
  config.noise_sigma = 0.0;
  config.seed = 21;
  const auto data = synth::generate(config);
  const EmbeddingModel<double> model(data.world.generator.completeOrthogonalDecomposition().pseudoInverse());
  LossConfig loss;
  loss.margin = synth::kMinLabelSeparation - 1e-6;
  for (LossKind kind : {LossKind::whole_image_ranking, LossKind::mie, LossKind::mie_rank_weighted}) {
    loss.kind = kind;
    for (const auto& bag : data.train) {
      const auto& labels = bag.labels();
      const auto out = evaluate_loss(model, bag, data.world.space, std::span<const std::string>(labels), loss);
      CHECK(out.value == 0.0);
    }
  }
}

TEST_CASE("single-label bags: whole image equals the label instance") {
  synth::SynthConfig config;
  config.num_bags = 50;
  config.min_labels = 1;
  config.max_labels = 1;
  config.distractor_instances = 0;
  config.seed = 2;
  const auto data = synth::generate(config);
  for (const auto& bag : data.train) {
    REQUIRE(bag.size() == 2);
    CHECK(bag.feature(0) == bag.feature(1));
  }
}

TEST_CASE("config validation and infeasible vocabularies") {
  synth::SynthConfig config;
  CHECK_NOTHROW(config.validate());
  auto broken = [](auto mutate) {
    synth::SynthConfig c;
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(broken([](auto& c) { c.min_labels = 0; }).validate(), Error);
  CHECK_THROWS_AS(broken([](auto& c) { c.min_labels = 4; }).validate(), Error);
  CHECK_THROWS_AS(broken([](auto& c) { c.max_labels = 12; }).validate(), Error);
  CHECK_THROWS_AS(broken([](auto& c) { c.noise_sigma = -1; }).validate(), Error);
  CHECK_THROWS_AS(broken([](auto& c) { c.num_bags = 0; }).validate(), Error);
  CHECK_THROWS_AS(broken([](auto& c) { c.held_out_bags = 5000; }).validate(), Error);
  CHECK_THROWS_AS(broken([](auto& c) { c.distractor_instances = 40; }).validate(), Error);

  std::mt19937_64 rng(1);
  CHECK_THROWS_WITH_AS(synth::make_world(50, 2, 8, rng), doctest::Contains("semantic dimension"), Error);
}
