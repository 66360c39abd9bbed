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

#ifndef MIE_TRAINER_HPP_
#define MIE_TRAINER_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "mie/bags.hpp"
#include "mie/common.hpp"
#include "mie/embedding.hpp"
#include "mie/losses.hpp"
#include "mie/semantic_space.hpp"

namespace mie {

struct TrainConfig {
  LossConfig loss;
  std::size_t batch_size = 100;
  double momentum = 0.9;
  double initial_lr = 0.1;
  std::size_t lr_step_epochs = 10;
  double lr_gamma = 0.1;
  double weight_decay = 0.0005;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  // Worker threads per batch. Results are bitwise reproducible for a fixed
  // value; jobs = 1 is the reference.
  std::size_t jobs = 1;

  void validate() const {
    loss.validate();
    require(batch_size >= 1, "train: batch size must be positive");
    require(momentum >= 0.0 && momentum < 1.0, "train: momentum must lie in [0, 1)");
    require(initial_lr > 0.0, "train: learning rate must be positive");
    require(lr_step_epochs >= 1, "train: lr step must be positive");
    require(lr_gamma > 0.0 && lr_gamma < 1.0, "train: lr gamma must lie in (0, 1)");
    require(weight_decay >= 0.0, "train: weight decay must be nonnegative");
    require(epochs >= 1, "train: epoch count must be positive");
    require(jobs >= 1, "train: jobs must be positive");
  }
};

struct EpochRecord {
  std::size_t epoch;  // 1-based
  double mean_loss;   // mean over batches of the batch-mean loss
  double learning_rate;
  double seconds;
};

using TrainHistory = std::vector<EpochRecord>;

/// "steps" policy: initial_lr * gamma^floor((epoch - 1) / step), epoch 1-based.
inline double learning_rate_at(const TrainConfig& config, std::size_t epoch) {
  const auto drops = static_cast<double>((epoch - 1) / config.lr_step_epochs);
  return config.initial_lr * std::pow(config.lr_gamma, drops);
}

template <typename Scalar>
struct TrainResult {
  EmbeddingModel<Scalar> model;
  TrainHistory history;
};

namespace detail {

// Positive labels of each bag restricted to the vocabulary.
template <typename Scalar>
std::vector<std::vector<std::string>> training_positives(std::span<const InstanceBag<Scalar>> dataset,
                                                         const LabelSpace<Scalar>& space) {
  std::vector<std::vector<std::string>> out;
  out.reserve(dataset.size());
  for (const auto& bag : dataset) {
    std::vector<std::string> known;
    for (const auto& label : bag.labels())
      if (space.find(label)) known.push_back(label);
    require(!known.empty(), "train: bag '" + bag.id() + "' has no ground-truth label in the label space");
    require(known.size() < space.size(), "train: bag '" + bag.id() + "' is positive for every label");
    out.push_back(std::move(known));
  }
  return out;
}

template <typename Fn>
void parallel_chunks(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    fn(std::size_t{0}, std::size_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::jthread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    const std::size_t begin = count * w / jobs;
    const std::size_t end = count * (w + 1) / jobs;
    workers.emplace_back([&, w, begin, end] {
      try {
        fn(w, begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  workers.clear();
  for (auto& error : errors)
    if (error) std::rethrow_exception(error);
}

}  // namespace detail

/// Mini-batch SGD with momentum, step learning-rate decay and L2 weight decay,
/// starting from the given model:
///   v <- momentum v - lr (g + weight_decay W),   W <- W + v
/// where g is the batch-mean loss gradient.
template <typename Scalar>
TrainResult<Scalar> train(std::span<const InstanceBag<Scalar>> dataset, const LabelSpace<Scalar>& space,
                          const TrainConfig& config, EmbeddingModel<Scalar> model, std::mt19937_64& rng) {
  config.validate();
  require(!dataset.empty(), "train: empty dataset");
  require(model.semantic_dim() == space.dim(), "train: model output dimension does not match the label space");
  for (const auto& bag : dataset)
    require(bag.feature_dim() == model.feature_dim(),
            "train: bag '" + bag.id() + "' feature dimension does not match the model");
  const auto positives = detail::training_positives(dataset, space);

  TrainResult<Scalar> result;
  Matrix<Scalar> velocity = Matrix<Scalar>::Zero(model.semantic_dim(), model.feature_dim());
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const auto lr = static_cast<Scalar>(learning_rate_at(config, epoch));
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size, ++batches) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const std::size_t count = end - begin;
      const std::size_t jobs = std::min(config.jobs, count);

      std::vector<Scalar> partial_loss(jobs, Scalar(0));
      std::vector<Matrix<Scalar>> partial_grad(jobs, Matrix<Scalar>::Zero(model.semantic_dim(), model.feature_dim()));
      detail::parallel_chunks(count, jobs, [&](std::size_t worker, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          const std::size_t b = order[begin + i];
          std::optional<LossRng> sampler;
          if (config.loss.negative_cap) {
            std::seed_seq seq{config.seed, static_cast<std::uint64_t>(epoch), static_cast<std::uint64_t>(b)};
            sampler.emplace(seq);
          }
          auto eval = evaluate_loss(model, dataset[b], space, std::span<const std::string>(positives[b]),
                                    config.loss, sampler ? &*sampler : nullptr);
          partial_loss[worker] += eval.value;
          partial_grad[worker] += eval.grad;
        }
      });

      Scalar batch_loss = partial_loss[0];
      Matrix<Scalar> grad = std::move(partial_grad[0]);
      for (std::size_t w = 1; w < jobs; ++w) {
        batch_loss += partial_loss[w];
        grad += partial_grad[w];
      }
      batch_loss /= static_cast<Scalar>(count);
      grad /= static_cast<Scalar>(count);
      if (!std::isfinite(static_cast<double>(batch_loss)) || !grad.allFinite())
        throw Error("train: non-finite loss or gradient at epoch " + std::to_string(epoch) + ", batch " +
                    std::to_string(batches + 1));

      velocity = Scalar(config.momentum) * velocity - lr * (grad + Scalar(config.weight_decay) * model.weight());
      model.weight() += velocity;
      if (!model.weight().allFinite())
        throw Error("train: non-finite weights after the update at epoch " + std::to_string(epoch) + ", batch " +
                    std::to_string(batches + 1));
      loss_sum += static_cast<double>(batch_loss);
    }

    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    result.history.push_back({epoch, loss_sum / static_cast<double>(batches), static_cast<double>(lr),
                              elapsed.count()});
  }
  result.model = std::move(model);
  return result;
}

/// Seeds the generator, initializes the model with the uniform fan-based
/// scheme, then trains. Identical inputs give bitwise-identical results.
template <typename Scalar>
TrainResult<Scalar> train(std::span<const InstanceBag<Scalar>> dataset, const LabelSpace<Scalar>& space,
                          const TrainConfig& config) {
  require(!dataset.empty(), "train: empty dataset");
  std::mt19937_64 rng(config.seed);
  auto model = initialize_model<Scalar>(dataset.front().feature_dim(), space.dim(), rng);
  return train(dataset, space, config, std::move(model), rng);
}

template <typename Scalar>
TrainResult<Scalar> train(const std::vector<InstanceBag<Scalar>>& dataset, const LabelSpace<Scalar>& space,
                          const TrainConfig& config) {
  return train(std::span<const InstanceBag<Scalar>>(dataset), space, config);
}

inline constexpr double kMinGenericGap = 1e-6;

struct FiniteDifferenceOptions {
  double step = 1e-5;
  std::size_t max_full_entries = 4096;
  std::size_t subset_size = 512;
  std::uint64_t seed = 0;
};

/// Max relative error between the analytic gradient and central differences
/// (evaluated in extended precision). The relative error of an entry is
/// |a - n| / max(|a|, |n|, 1e-8). Models with more than max_full_entries
/// weights are checked on a seeded random subset of subset_size entries.
/// Throws when the point is within kMinGenericGap of a kink.
inline double finite_difference_check(const EmbeddingModel<double>& model, const InstanceBag<double>& bag,
                                      const LabelSpace<double>& space, std::span<const std::string> positives,
                                      const LossConfig& config, const FiniteDifferenceOptions& options = {}) {
  using Wide = long double;
  require(options.step > 0.0, "finite_difference_check: step must be positive");
  const std::uint64_t sampling_seed = options.seed ^ 0x9e3779b97f4a7c15ULL;
  auto fresh_rng = [&] { return LossRng(sampling_seed); };

  {
    auto rng = fresh_rng();
    const double gap = loss_genericity_gap(model, bag, space, positives, config, &rng);
    if (gap < kMinGenericGap)
      throw Error("finite_difference_check: evaluation point is not generic (kink within " + std::to_string(gap) +
                  "); perturb the model and retry");
  }
  auto rng = fresh_rng();
  const auto analytic = evaluate_loss(model, bag, space, positives, config, &rng).grad;

  const auto wide_bag = bag.cast<Wide>();
  const auto wide_space = space.cast<Wide>();
  auto wide_model = model.cast<Wide>();

  const Index total = analytic.size();
  std::vector<Index> entries(static_cast<std::size_t>(total));
  std::iota(entries.begin(), entries.end(), Index{0});
  if (static_cast<std::size_t>(total) > options.max_full_entries) {
    std::mt19937_64 pick(options.seed);
    std::vector<Index> subset;
    std::sample(entries.begin(), entries.end(), std::back_inserter(subset), options.subset_size, pick);
    entries = std::move(subset);
  }

  const Wide h = options.step;
  double worst = 0.0;
  for (Index e : entries) {
    Wide& w = wide_model.weight().data()[e];
    const Wide saved = w;
    w = saved + h;
    auto plus_rng = fresh_rng();
    const Wide plus = evaluate_loss(wide_model, wide_bag, wide_space, positives, config, &plus_rng).value;
    w = saved - h;
    auto minus_rng = fresh_rng();
    const Wide minus = evaluate_loss(wide_model, wide_bag, wide_space, positives, config, &minus_rng).value;
    w = saved;
    const double numeric = static_cast<double>((plus - minus) / (2 * h));
    const double exact = analytic.data()[e];
    const double denom = std::max({std::abs(exact), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(exact - numeric) / denom);
  }
  return worst;
}

struct GradientCheckReport {
  double max_relative_error = 0.0;
  std::vector<double> per_sample;
  std::size_t redraws = 0;
};

/// Runs finite_difference_check at `samples` seeded random points. Each point
/// is a bag drawn from `bags` with a freshly initialized model; points closer
/// than min_gap to a kink are redrawn.
inline GradientCheckReport run_gradient_check(std::span<const InstanceBag<double>> bags,
                                              const LabelSpace<double>& space, const LossConfig& config,
                                              std::size_t samples, double step, std::uint64_t seed,
                                              double min_gap = 1e-4) {
  require(!bags.empty(), "gradcheck: no bags");
  std::vector<std::size_t> usable;
  std::vector<std::vector<std::string>> positives(bags.size());
  for (std::size_t b = 0; b < bags.size(); ++b) {
    for (const auto& label : bags[b].labels())
      if (space.find(label)) positives[b].push_back(label);
    if (!positives[b].empty() && positives[b].size() < space.size()) usable.push_back(b);
  }
  require(!usable.empty(), "gradcheck: no bag has a label from the label space");

  constexpr std::size_t kMaxDraws = 1000;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, usable.size() - 1);
  GradientCheckReport report;
  for (std::size_t s = 0; s < samples; ++s) {
    bool done = false;
    for (std::size_t attempt = 0; attempt < kMaxDraws && !done; ++attempt) {
      const std::size_t b = usable[pick(rng)];
      const auto model = initialize_model<double>(bags[b].feature_dim(), space.dim(), rng);
      const std::uint64_t point_seed = rng();
      LossRng gap_rng(point_seed ^ 0x9e3779b97f4a7c15ULL);
      const auto& pos = positives[b];
      if (loss_genericity_gap(model, bags[b], space, std::span<const std::string>(pos), config, &gap_rng) < min_gap) {
        ++report.redraws;
        continue;
      }
      FiniteDifferenceOptions options;
      options.step = step;
      options.seed = point_seed;
      const double err =
          finite_difference_check(model, bags[b], space, std::span<const std::string>(pos), config, options);
      report.per_sample.push_back(err);
      report.max_relative_error = std::max(report.max_relative_error, err);
      done = true;
    }
    require(done, "gradcheck: could not draw a generic point");
  }
  return report;
}

}  // namespace mie

#endif  // MIE_TRAINER_HPP_
