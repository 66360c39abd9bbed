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

#ifndef MIE_METRICS_HPP_
#define MIE_METRICS_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mie {

/// bag id -> label names (a top-k prediction set or a ground-truth set).
using LabelSets = std::map<std::string, std::vector<std::string>>;

/// Fixed-k annotation metrics, all in percent.
///
/// Per-class means skip labels whose denominator is zero (never in the
/// ground truth for recall, never predicted for precision); the number of
/// skipped labels is reported next to each mean.
struct MetricsReport {
  std::size_t k = 0;
  double per_class_recall = 0.0;
  double per_class_precision = 0.0;
  double overall_recall = 0.0;
  double overall_precision = 0.0;
  double n_plus = 0.0;

  std::size_t recall_skipped = 0;
  std::size_t precision_skipped = 0;
  std::size_t vocabulary_size = 0;
  std::size_t num_bags = 0;
};

MetricsReport evaluate_annotations(const LabelSets& predictions, const LabelSets& truths,
                                   std::span<const std::string> vocabulary, std::size_t k);

/// Ceiling assignment: k random ground-truth labels when a bag has at least
/// k, otherwise all of them padded with random non-truth labels. Bags are
/// visited in id order from a single generator seeded with `seed`.
LabelSets upper_bound_assignments(const LabelSets& truths, std::span<const std::string> vocabulary, std::size_t k,
                                  std::uint64_t seed);

enum class MapAveraging { macro, micro };

/// Percentage of images whose single true label is within the top k of its
/// ranking. macro averages the hit rate per class first.
double map_at_k(const LabelSets& rankings, const std::map<std::string, std::string>& truths, std::size_t k,
                MapAveraging averaging = MapAveraging::macro);

/// Aligned plain-text table, values with two decimals.
std::string render_table(const MetricsReport& report);

}  // namespace mie

#endif  // MIE_METRICS_HPP_
