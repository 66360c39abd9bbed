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

#include "mie/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <random>
#include <set>
#include <unordered_map>

#include "mie/common.hpp"

namespace mie {
namespace {

std::unordered_map<std::string, std::size_t> index_vocabulary(std::span<const std::string> vocabulary) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vocabulary.size(); ++i)
    require(index.emplace(vocabulary[i], i).second, "metrics: duplicate vocabulary label '" + vocabulary[i] + "'");
  return index;
}

std::size_t lookup(const std::unordered_map<std::string, std::size_t>& index, const std::string& label,
                   const std::string& bag, const char* what) {
  auto it = index.find(label);
  require(it != index.end(),
          std::string("metrics: ") + what + " label '" + label + "' of bag '" + bag + "' is not in the vocabulary");
  return it->second;
}

double percent(double num, double den) { return den > 0.0 ? 100.0 * num / den : 0.0; }

}  // namespace

MetricsReport evaluate_annotations(const LabelSets& predictions, const LabelSets& truths,
                                   std::span<const std::string> vocabulary, std::size_t k) {
  require(k >= 1, "metrics: k must be positive");
  const auto index = index_vocabulary(vocabulary);
  require(predictions.size() == truths.size(), "metrics: predictions cover " + std::to_string(predictions.size()) +
                                                   " bags but ground truth covers " + std::to_string(truths.size()));

  const std::size_t t = vocabulary.size();
  std::vector<std::size_t> correct(t, 0), truth_count(t, 0), predicted_count(t, 0);
  for (const auto& [bag, predicted] : predictions) {
    auto truth_it = truths.find(bag);
    require(truth_it != truths.end(), "metrics: bag '" + bag + "' has predictions but no ground truth");
    require(predicted.size() == k, "metrics: bag '" + bag + "' has " + std::to_string(predicted.size()) +
                                       " predictions, expected k = " + std::to_string(k));

    std::vector<bool> is_truth(t, false);
    for (const auto& label : truth_it->second) {
      const std::size_t i = lookup(index, label, bag, "ground-truth");
      if (!is_truth[i]) ++truth_count[i];
      is_truth[i] = true;
    }
    std::vector<bool> seen(t, false);
    for (const auto& label : predicted) {
      const std::size_t i = lookup(index, label, bag, "predicted");
      require(!seen[i], "metrics: bag '" + bag + "' predicts label '" + label + "' twice");
      seen[i] = true;
      ++predicted_count[i];
      if (is_truth[i]) ++correct[i];
    }
  }

  MetricsReport report;
  report.k = k;
  report.vocabulary_size = t;
  report.num_bags = predictions.size();

  double recall_sum = 0.0, precision_sum = 0.0;
  std::size_t recall_terms = 0, precision_terms = 0, recalled_labels = 0;
  std::size_t total_correct = 0, total_truth = 0, total_predicted = 0;
  for (std::size_t i = 0; i < t; ++i) {
    if (truth_count[i] > 0) {
      recall_sum += static_cast<double>(correct[i]) / static_cast<double>(truth_count[i]);
      ++recall_terms;
    }
    if (predicted_count[i] > 0) {
      precision_sum += static_cast<double>(correct[i]) / static_cast<double>(predicted_count[i]);
      ++precision_terms;
    }
    if (correct[i] > 0) ++recalled_labels;
    total_correct += correct[i];
    total_truth += truth_count[i];
    total_predicted += predicted_count[i];
  }
  report.per_class_recall = percent(recall_sum, static_cast<double>(recall_terms));
  report.per_class_precision = percent(precision_sum, static_cast<double>(precision_terms));
  report.overall_recall = percent(static_cast<double>(total_correct), static_cast<double>(total_truth));
  report.overall_precision = percent(static_cast<double>(total_correct), static_cast<double>(total_predicted));
  report.n_plus = percent(static_cast<double>(recalled_labels), static_cast<double>(t));
  report.recall_skipped = t - recall_terms;
  report.precision_skipped = t - precision_terms;
  return report;
}

LabelSets upper_bound_assignments(const LabelSets& truths, std::span<const std::string> vocabulary, std::size_t k,
                                  std::uint64_t seed) {
  require(k >= 1 && k <= vocabulary.size(), "upper bound: k = " + std::to_string(k) + " must lie in [1, " +
                                                std::to_string(vocabulary.size()) + "]");
  std::mt19937_64 rng(seed);
  LabelSets out;
  for (const auto& [bag, truth] : truths) {
    std::vector<std::string> unique_truth;
    for (const auto& label : truth)
      if (std::find(unique_truth.begin(), unique_truth.end(), label) == unique_truth.end())
        unique_truth.push_back(label);

    std::vector<std::string> chosen;
    if (unique_truth.size() >= k) {
      std::sample(unique_truth.begin(), unique_truth.end(), std::back_inserter(chosen), k, rng);
    } else {
      chosen = unique_truth;
      std::vector<std::string> others;
      for (const auto& label : vocabulary)
        if (std::find(unique_truth.begin(), unique_truth.end(), label) == unique_truth.end())
          others.push_back(label);
      std::sample(others.begin(), others.end(), std::back_inserter(chosen), k - unique_truth.size(), rng);
    }
    require(chosen.size() == k, "upper bound: bag '" + bag + "' cannot be filled to k labels");
    out.emplace(bag, std::move(chosen));
  }
  return out;
}

double map_at_k(const LabelSets& rankings, const std::map<std::string, std::string>& truths, std::size_t k,
                MapAveraging averaging) {
  require(k >= 1, "map@k: k must be positive");
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_class;  // class -> (hits, images)
  std::size_t hits = 0;
  for (const auto& [image, truth] : truths) {
    auto it = rankings.find(image);
    require(it != rankings.end(), "map@k: image '" + image + "' has no ranking");
    require(it->second.size() >= k, "map@k: ranking of image '" + image + "' has " +
                                        std::to_string(it->second.size()) + " entries, fewer than k = " +
                                        std::to_string(k));
    const bool hit = std::find(it->second.begin(), it->second.begin() + static_cast<std::ptrdiff_t>(k), truth) !=
                     it->second.begin() + static_cast<std::ptrdiff_t>(k);
    auto& counts = per_class[truth];
    counts.first += hit ? 1 : 0;
    counts.second += 1;
    hits += hit ? 1 : 0;
  }
  if (truths.empty()) return 0.0;
  if (averaging == MapAveraging::micro) return percent(static_cast<double>(hits), static_cast<double>(truths.size()));

  double sum = 0.0;
  for (const auto& [label, counts] : per_class)
    sum += static_cast<double>(counts.first) / static_cast<double>(counts.second);
  return percent(sum, static_cast<double>(per_class.size()));
}

std::string render_table(const MetricsReport& report) {
  const char* names[] = {"per-class recall", "per-class precision", "overall recall", "overall precision", "N+"};
  const double values[] = {report.per_class_recall, report.per_class_precision, report.overall_recall,
                           report.overall_precision, report.n_plus};
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-20s %8s\n", ("metric (k=" + std::to_string(report.k) + ")").c_str(), "value");
  out += line;
  for (int i = 0; i < 5; ++i) {
    std::snprintf(line, sizeof line, "%-20s %8.2f\n", names[i], values[i]);
    out += line;
  }
  std::snprintf(line, sizeof line, "bags %zu, vocabulary %zu, skipped labels: recall %zu, precision %zu\n",
                report.num_bags, report.vocabulary_size, report.recall_skipped, report.precision_skipped);
  out += line;
  return out;
}

}  // namespace mie
