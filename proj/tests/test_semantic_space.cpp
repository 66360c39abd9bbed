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

#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "mie/semantic_space.hpp"
#include "test_support.hpp"

using namespace mie;
using mie::testing::vec;

TEST_CASE("load_label_space normalizes each vector") {
  const auto space = load_label_space(std::vector<LabelRecord<double>>{{"a", vec({3, 4})}});
  CHECK(space.size() == 1);
  CHECK(space.dim() == 2);
  CHECK(space.vector(0)(0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(space.vector(0)(1) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("load_label_space keeps unit vectors and insertion order") {
  const auto space = load_label_space(std::vector<LabelRecord<double>>{{"a", vec({1, 0})}, {"b", vec({0, 1})}});
  CHECK(space.names() == std::vector<std::string>{"a", "b"});
  CHECK(space.vector(0) == vec({1, 0}));
  CHECK(space.vector(1) == vec({0, 1}));
  CHECK(space.index_of("b") == 1);
  CHECK_FALSE(space.find("c").has_value());
  CHECK_THROWS_AS(space.index_of("c"), Error);
}

TEST_CASE("load_label_space rejections") {
  CHECK_THROWS_WITH_AS(load_label_space(std::vector<LabelRecord<double>>{{"a", vec({1, 0})}, {"a", vec({0, 1})}}),
                       doctest::Contains("duplicate label 'a'"), Error);
  CHECK_THROWS_WITH_AS(load_label_space(std::vector<LabelRecord<double>>{{"z", vec({0, 0})}}),
                       doctest::Contains("'z' is the zero vector"), Error);
  CHECK_THROWS_AS(load_label_space(std::vector<LabelRecord<double>>{{"a", vec({1, 0})}, {"b", vec({1, 0, 0})}}),
                  Error);
  CHECK_THROWS_AS(load_label_space(std::vector<LabelRecord<double>>{{"", vec({1, 0})}}), Error);
  CHECK_THROWS_AS(load_label_space(std::vector<LabelRecord<double>>{}), Error);
}

TEST_CASE("load_label_space is idempotent") {
  std::mt19937_64 rng(7);
  const auto once = mie::testing::random_space(20, 6, rng);
  std::vector<LabelRecord<double>> again;
  for (std::size_t i = 0; i < once.size(); ++i) again.push_back({once.name(i), once.vector(i)});
  const auto twice = load_label_space(again);
  CHECK((twice.vectors() - once.vectors()).cwiseAbs().maxCoeff() <= 1e-12);
  for (std::size_t i = 0; i < once.size(); ++i) CHECK(std::abs(once.vector(i).norm() - 1.0) <= 1e-9);
}

TEST_CASE("squared_distance examples") {
  CHECK(squared_distance(vec({1, 0}), vec({1, 0})) == 0.0);
  CHECK(squared_distance(vec({1, 0}), vec({-1, 0})) == 4.0);
  CHECK(squared_distance(vec({0.6, 0.8}), vec({1, 0})) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_THROWS_AS(squared_distance(vec({1, 0}), vec({1, 0, 0})), Error);
}

TEST_CASE("squared_distance on unit vectors lies in [0, 4] and is symmetric") {
  std::mt19937_64 rng(11);
  const auto space = mie::testing::random_space(50, 5, rng);
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t j = 0; j < space.size(); ++j) {
      const double d = squared_distance(space.vector(i), space.vector(j));
      CHECK(d >= 0.0);
      CHECK(d <= 4.0 + 1e-12);
      CHECK(d == squared_distance(space.vector(j), space.vector(i)));
    }
}

TEST_CASE("rank_labels_by_distance examples") {
  const auto space = load_label_space(std::vector<LabelRecord<double>>{{"a", vec({1, 0})}, {"b", vec({0, 1})}});
  CHECK(rank_labels_by_distance(space, std::map<std::string, double>{{"a", 0.3}, {"b", 0.1}}) ==
        std::vector<std::string>{"b", "a"});
  CHECK(rank_labels_by_distance(space, std::map<std::string, double>{{"a", 0.2}, {"b", 0.2}}) ==
        std::vector<std::string>{"a", "b"});
  CHECK_THROWS_WITH_AS(rank_labels_by_distance(space, std::map<std::string, double>{{"a", 0.2}}),
                       doctest::Contains("'b'"), Error);
}

TEST_CASE("rank_labels_by_distance matches a selection-sort oracle") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uniform(0.0, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto space = mie::testing::random_space(5, 3, rng);
    std::map<std::string, double> distances;
    for (const auto& name : space.names()) distances[name] = uniform(rng);

    std::vector<std::string> expected;
    auto remaining = distances;
    while (!remaining.empty()) {
      auto best = remaining.begin();
      for (auto it = remaining.begin(); it != remaining.end(); ++it)
        if (it->second < best->second) best = it;
      expected.push_back(best->first);
      remaining.erase(best);
    }
    const auto ranked = rank_labels_by_distance(space, distances);
    CHECK(ranked == expected);
    CHECK(std::set<std::string>(ranked.begin(), ranked.end()).size() == space.size());
  }
}
