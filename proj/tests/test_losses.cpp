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

#include <random>

#include "doctest.h"
#include "mie/losses.hpp"
#include "test_support.hpp"

using namespace mie;
using mie::testing::at_distance_from_e1;
using mie::testing::vec;

namespace {

const EmbeddingModel<double> kIdentity2(Matrix<double>::Identity(2, 2));

// A single-instance bag whose embedding under kIdentity2 is (1, 0).
InstanceBag<double> e1_bag() { return build_bag<double>("b", vec({2, 0}), std::vector<Region<double>>{}); }

LabelSpace<double> space_at(const std::vector<std::pair<std::string, double>>& distances) {
  std::vector<LabelRecord<double>> records;
  for (const auto& [name, d] : distances) records.push_back({name, at_distance_from_e1(d)});
  return load_label_space(records);
}

struct RandomCase {
  EmbeddingModel<double> model;
  InstanceBag<double> bag;
  LabelSpace<double> space;
  std::vector<std::string> positives;
};

// Draws until the point is at least `gap` away from every kink of `kind`.
RandomCase generic_case(std::mt19937_64& rng, Index instances, std::size_t num_pos, std::size_t num_neg,
                        LossConfig config) {
  while (true) {
    RandomCase c{mie::testing::random_model(4, 6, rng), mie::testing::random_bag(instances, 6, rng),
                 mie::testing::random_space(num_pos + num_neg, 4, rng), {}};
    for (std::size_t p = 0; p < num_pos; ++p) c.positives.push_back(c.space.name(p));
    if (loss_genericity_gap(c.model, c.bag, c.space, std::span<const std::string>(c.positives), config) > 1e-4)
      return c;
  }
}

}  // namespace

TEST_CASE("rank_weight") {
  CHECK(rank_weight(1, 3) == 1.0);
  CHECK(rank_weight(5, 3) == 5.0);
  CHECK(rank_weight(3, 3) == 3.0);
  CHECK(rank_weight(0, 1) == 1.0);
}

TEST_CASE("whole_image_ranking_loss hand examples") {
  const auto bag = e1_bag();
  LossConfig config;
  config.margin = 0.1;

  SUBCASE("inactive hinge") {
    const auto space = space_at({{"p", 0.2}, {"n", 0.9}});
    const std::vector<std::string> pos{"p"};
    const auto out = whole_image_ranking_loss(kIdentity2, bag, space, std::span<const std::string>(pos), config);
    CHECK(out.value == 0.0);
    CHECK(out.grad.isZero(0.0));
  }
  SUBCASE("active hinge") {
    const auto space = space_at({{"p", 0.5}, {"n", 0.2}});
    const std::vector<std::string> pos{"p"};
    const auto out = whole_image_ranking_loss(kIdentity2, bag, space, std::span<const std::string>(pos), config);
    CHECK(out.value == doctest::Approx(0.4).epsilon(1e-12));
    CHECK_FALSE(out.grad.isZero(0.0));
  }
  SUBCASE("rejections") {
    const auto space = space_at({{"p", 0.5}, {"n", 0.2}});
    const std::vector<std::string> unknown{"q"};
    CHECK_THROWS_WITH_AS(evaluate_loss(kIdentity2, bag, space, unknown, config), doctest::Contains("'q'"), Error);
    const std::vector<std::string> all{"p", "n"};
    CHECK_THROWS_WITH_AS(evaluate_loss(kIdentity2, bag, space, all, config), doctest::Contains("no negatives"),
                         Error);
    const std::vector<std::string> none;
    CHECK_THROWS_AS(evaluate_loss(kIdentity2, bag, space, none, config), Error);
    LossConfig bad = config;
    bad.margin = 0.0;
    const std::vector<std::string> pos{"p"};
    CHECK_THROWS_AS(evaluate_loss(kIdentity2, bag, space, pos, bad), Error);
  }
}

TEST_CASE("all three losses match the brute-force evaluator and central differences") {
  std::mt19937_64 rng(2024);
  struct Shape {
    LossKind kind;
    Index instances;
    std::size_t pos, neg;
  };
  for (const Shape& shape : {Shape{LossKind::whole_image_ranking, 3, 3, 5}, Shape{LossKind::mie, 4, 2, 6},
                             Shape{LossKind::mie_rank_weighted, 4, 2, 6}, Shape{LossKind::mie_rank_weighted, 5, 3, 5}}) {
    CAPTURE(loss_kind_name(shape.kind));
    LossConfig config;
    config.kind = shape.kind;
    config.margin = 0.3;
    for (int trial = 0; trial < 10; ++trial) {
      const auto c = generic_case(rng, shape.instances, shape.pos, shape.neg, config);
      const auto out = evaluate_loss(c.model, c.bag, c.space, c.positives, config);
      const double expected =
          mie::testing::brute_force_loss<double>(c.model.weight(), c.bag, c.space, c.positives, shape.kind, 0.3);
      CHECK(out.value == doctest::Approx(expected).epsilon(1e-12));
      const auto numeric =
          mie::testing::brute_force_gradient(c.model.weight(), c.bag, c.space, c.positives, shape.kind, 0.3);
      CHECK(mie::testing::max_relative_error(out.grad, numeric) <= 1e-4);
    }
  }
}

TEST_CASE("mie_loss on a single-instance bag equals the whole-image loss") {
  std::mt19937_64 rng(17);
  LossConfig config;
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = mie::testing::random_model(4, 6, rng);
    const auto bag = mie::testing::random_bag(1, 6, rng);
    const auto space = mie::testing::random_space(7, 4, rng);
    const std::vector<std::string> pos{space.name(0), space.name(3)};
    const auto a = mie_loss(model, bag, space, std::span<const std::string>(pos), config);
    const auto b = whole_image_ranking_loss(model, bag, space, std::span<const std::string>(pos), config);
    CHECK(std::abs(a.value - b.value) <= 1e-12);
    CHECK((a.grad - b.grad).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("mie_loss is zero when every positive has an exact instance") {
  const EmbeddingModel<double> identity(Matrix<double>::Identity(3, 3));
  std::vector<LabelRecord<double>> records{
      {"p1", vec({1, 0, 0})}, {"p2", vec({0, 1, 0})}, {"n1", vec({0, 0, 1})}, {"n2", vec({-1, 0, 0})}};
  const auto space = load_label_space(records);
  std::vector<Region<double>> regions{{vec({1, 0, 0}), {0, 0, 0.5, 0.5}}, {vec({0, 3, 0}), {0.5, 0.5, 1, 1}}};
  const auto bag = build_bag<double>("b", vec({1, 1, 0}), regions);
  const std::vector<std::string> pos{"p1", "p2"};
  LossConfig config;
  for (LossKind kind : {LossKind::mie, LossKind::mie_rank_weighted}) {
    config.kind = kind;
    const auto out = evaluate_loss(identity, bag, space, pos, config);
    CHECK(out.value == 0.0);
    CHECK(out.grad.isZero(0.0));
  }
  // The whole image alone sits between the positives and does not achieve it.
  config.kind = LossKind::whole_image_ranking;
  config.margin = 1.5;
  CHECK(evaluate_loss(identity, bag, space, pos, config).value > 0.0);
}

TEST_CASE("label_rank") {
  const auto bag = e1_bag();
  const auto space = space_at({{"a", 0.1}, {"b", 0.2}, {"c", 0.3}});
  CHECK(label_rank(kIdentity2, bag, space, "a") == 0);
  CHECK(label_rank(kIdentity2, bag, space, "b") == 1);
  CHECK(label_rank(kIdentity2, bag, space, "c") == 2);
  CHECK_THROWS_AS(label_rank(kIdentity2, bag, space, "zz"), Error);

  const auto tied = space_at({{"a", 0.2}, {"b", 0.2}, {"c", 0.2}, {"d", 0.5}});
  CHECK(label_rank(kIdentity2, bag, tied, "a") == 2);
  CHECK(label_rank(kIdentity2, bag, tied, "d") == 3);

  Vector<double> distances = vec({0.1, 0.2, 0.3, 0.05});
  const std::vector<std::size_t> excluded{3};
  CHECK(label_rank(distances, 1) == 2);
  CHECK(label_rank(distances, 1, excluded) == 1);
}

TEST_CASE("mie_rank_weighted_loss reductions") {
  std::mt19937_64 rng(99);
  LossConfig weighted;
  weighted.kind = LossKind::mie_rank_weighted;
  LossConfig forced = weighted;
  forced.force_unit_weights = true;
  LossConfig plain;
  plain.kind = LossKind::mie;

  for (int trial = 0; trial < 30; ++trial) {
    const auto model = mie::testing::random_model(4, 6, rng);
    const auto bag = mie::testing::random_bag(4, 6, rng);
    const auto space = mie::testing::random_space(8, 4, rng);
    const std::vector<std::string> pos{space.name(1), space.name(5)};
    const auto m = evaluate_loss(model, bag, space, pos, plain);
    const auto f = evaluate_loss(model, bag, space, pos, forced);
    const auto w = evaluate_loss(model, bag, space, pos, weighted);
    CHECK(f.value == m.value);
    CHECK(f.grad == m.grad);
    CHECK(w.value >= m.value);
    CHECK(w.value >= 0.0);
  }

  // Both positives ranked on top: all weights are 1.
  const auto bag = e1_bag();
  const auto space = space_at({{"p", 0.1}, {"q", 0.15}, {"n", 0.2}, {"o", 0.3}});
  const std::vector<std::string> pos{"p", "q"};
  const auto w = evaluate_loss(kIdentity2, bag, space, pos, weighted);
  CHECK(w.value > 0.0);
  CHECK(w.value == evaluate_loss(kIdentity2, bag, space, pos, plain).value);

  // The positive ranked last carries weight = its rank.
  const auto low = space_at({{"p", 0.9}, {"a", 0.1}, {"b", 0.2}, {"c", 0.3}});
  const std::vector<std::string> one{"p"};
  CHECK(evaluate_loss(kIdentity2, bag, low, one, weighted).value ==
        doctest::Approx(3.0 * evaluate_loss(kIdentity2, bag, low, one, plain).value).epsilon(1e-12));
}

TEST_CASE("loss is zero exactly when every pair clears the margin") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto model = mie::testing::random_model(3, 4, rng);
    const auto bag = mie::testing::random_bag(3, 4, rng);
    const auto space = mie::testing::random_space(4, 3, rng);
    const std::vector<std::string> pos{space.name(0)};
    LossConfig config;
    config.kind = LossKind::mie;
    config.margin = 0.05;
    const auto d = label_distances(embed_bag(model, bag).unit, space).distance;
    bool all_clear = true;
    for (Index k = 1; k < d.size(); ++k) all_clear = all_clear && d(0) + config.margin <= d(k);
    const auto out = evaluate_loss(model, bag, space, pos, config);
    CHECK((out.value == 0.0) == all_clear);
    CHECK(out.value >= 0.0);
  }
}

TEST_CASE("negative sampling") {
  std::mt19937_64 rng(12);
  const auto model = mie::testing::random_model(4, 6, rng);
  const auto bag = mie::testing::random_bag(3, 6, rng);
  const auto space = mie::testing::random_space(20, 4, rng);
  const std::vector<std::string> pos{space.name(0), space.name(1)};
  LossConfig config;
  config.kind = LossKind::mie;
  config.margin = 4.0;  // every pair active, so value counts terms

  const auto full = evaluate_loss(model, bag, space, pos, config);
  config.negative_cap = 5;
  CHECK_THROWS_AS(evaluate_loss(model, bag, space, pos, config), Error);
  LossRng a(3), b(3);
  const auto s1 = evaluate_loss(model, bag, space, pos, config, &a);
  const auto s2 = evaluate_loss(model, bag, space, pos, config, &b);
  CHECK(s1.value == s2.value);
  CHECK(s1.value < full.value);

  config.negative_cap = 18;  // no fewer than the negatives: no sampling
  CHECK(evaluate_loss(model, bag, space, pos, config).value == full.value);
}

TEST_CASE("loss_genericity_gap flags tied argmins") {
  const EmbeddingModel<double> identity(Matrix<double>::Identity(2, 2));
  std::vector<Region<double>> regions{{vec({1, 0}), {0, 0, 0.5, 0.5}}};
  const auto bag = build_bag<double>("b", vec({1, 0}), regions);
  const auto space = space_at({{"p", 0.5}, {"n", 0.2}});
  const std::vector<std::string> pos{"p"};
  LossConfig config;
  config.kind = LossKind::mie;
  CHECK(loss_genericity_gap(identity, bag, space, std::span<const std::string>(pos), config) == 0.0);
}
