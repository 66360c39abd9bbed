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

// Command-line front end: synth, train, predict, evaluate, zeroshot,
// gradcheck and replay. Every command that writes files also writes a run
// manifest next to its main output; `mie replay MANIFEST` re-runs it.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mie/bags.hpp"
#include "mie/inference.hpp"
#include "mie/io.hpp"
#include "mie/losses.hpp"
#include "mie/metrics.hpp"
#include "mie/synth.hpp"
#include "mie/trainer.hpp"

namespace {

using nlohmann::json;
constexpr const char* kVersion = "0.1.0";

std::string num(double v) { return json(v).dump(); }

struct FilterOptions {
  double min_side = 0.3;
  double max_aspect = 4.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--min-side", min_side, "Minimum subregion side, fraction of the image")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--max-aspect", max_aspect, "Maximum subregion aspect ratio")
        ->check(CLI::Range(1.0, 1e9))
        ->capture_default_str();
  }
  mie::RegionFilter filter() const { return {min_side, max_aspect}; }
  std::vector<std::string> args() const { return {"--min-side", num(min_side), "--max-aspect", num(max_aspect)}; }
};

void write_manifest(const std::string& path, const std::string& command, const std::vector<std::string>& args,
                    const json& config, std::uint64_t seed, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  json input_digests = json::array();
  for (const auto& in : inputs) input_digests.push_back({{"path", in}, {"sha256", mie::io::sha256_file(in)}});
  json output_digests = json::array();
  for (const auto& out : outputs) output_digests.push_back({{"path", out}, {"sha256", mie::io::sha256_file(out)}});
  json manifest{{"command", command},     {"version", kVersion},         {"seed", seed},
                {"config", config},       {"args", args},                {"inputs", std::move(input_digests)},
                {"outputs", std::move(output_digests)}};
  mie::io::write_text(path, manifest.dump(2) + "\n");
}

std::vector<std::string> vocabulary_of(const mie::LabelSpace<double>& space) { return space.names(); }

// ---------------------------------------------------------------- synth

struct SynthCmd {
  mie::synth::SynthConfig config;
  std::size_t held_out = 0;
  std::string out_dir;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("synth", "Generate a synthetic label space and bag files");
    cmd->add_option("--vocab", config.vocab_size, "Vocabulary size")->capture_default_str();
    cmd->add_option("--semantic-dim", config.semantic_dim, "Label vector dimension")->capture_default_str();
    cmd->add_option("--feature-dim", config.feature_dim, "Instance feature dimension")->capture_default_str();
    cmd->add_option("--min-labels", config.min_labels, "Minimum labels per bag")->capture_default_str();
    cmd->add_option("--max-labels", config.max_labels, "Maximum labels per bag")->capture_default_str();
    cmd->add_option("--distractors", config.distractor_instances, "Distractor instances per bag")
        ->capture_default_str();
    cmd->add_option("--noise", config.noise_sigma, "Feature noise sigma")->capture_default_str();
    cmd->add_option("--bags", config.num_bags, "Total bags (train + held-out)")->capture_default_str();
    cmd->add_option("--held-out", held_out, "Held-out bags (default: 10% of --bags)");
    cmd->add_option("--seed", config.seed, "Random seed")->capture_default_str();
    cmd->add_option("--out-dir", out_dir, "Output directory")->required();
    cmd->callback([this, cmd] {
      if (cmd->count("--held-out") > 0) config.held_out_bags = held_out;
      run();
    });
  }

  std::vector<std::string> args() const {
    return {"--vocab",      std::to_string(config.vocab_size),
            "--semantic-dim", std::to_string(config.semantic_dim),
            "--feature-dim", std::to_string(config.feature_dim),
            "--min-labels", std::to_string(config.min_labels),
            "--max-labels", std::to_string(config.max_labels),
            "--distractors", std::to_string(config.distractor_instances),
            "--noise",      num(config.noise_sigma),
            "--bags",       std::to_string(config.num_bags),
            "--held-out",   std::to_string(config.held_out_count()),
            "--seed",       std::to_string(config.seed),
            "--out-dir",    out_dir};
  }

  void run() {
    const auto data = mie::synth::generate(config);
    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    const std::string labels = (dir / "labels.tsv").string();
    const std::string train = (dir / "train.jsonl").string();
    const std::string held_out_path = (dir / "heldout.jsonl").string();
    mie::io::write_labels(labels, data.world.space);
    mie::io::write_bags(train, data.train);
    mie::io::write_bags(held_out_path, data.held_out);

    json config_json{{"vocab_size", config.vocab_size},
                     {"semantic_dim", config.semantic_dim},
                     {"feature_dim", config.feature_dim},
                     {"min_labels", config.min_labels},
                     {"max_labels", config.max_labels},
                     {"distractor_instances", config.distractor_instances},
                     {"noise_sigma", config.noise_sigma},
                     {"num_bags", config.num_bags},
                     {"held_out_bags", config.held_out_count()}};
    write_manifest((dir / "manifest.json").string(), "synth", args(), config_json, config.seed, {},
                   {labels, train, held_out_path});
    std::cerr << "wrote " << data.train.size() << " training and " << data.held_out.size() << " held-out bags to "
              << out_dir << "\n";
  }
};

// ---------------------------------------------------------------- train

struct TrainCmd {
  std::string labels, bags, out, history;
  std::string loss = "mie-warp";
  mie::TrainConfig config;
  std::size_t negative_cap = 0;
  bool record_time = false;
  FilterOptions filter;

  TrainCmd() { config.epochs = 30; }

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("train", "Train an embedding model with mini-batch SGD");
    cmd->add_option("--labels", labels, "Label file (TSV)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--bags", bags, "Training bag file (JSONL)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "Output model file (JSON)")->required();
    cmd->add_option("--history", history, "Epoch history file (default: OUT.history.jsonl)");
    cmd->add_option("--loss", loss, "Loss: rank, mie or mie-warp")
        ->check(CLI::IsMember({"rank", "mie", "mie-warp"}))
        ->capture_default_str();
    cmd->add_option("--margin", config.loss.margin, "Hinge margin")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--epochs", config.epochs, "Epochs")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--batch-size", config.batch_size, "Mini-batch size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--lr", config.initial_lr, "Initial learning rate")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--lr-step", config.lr_step_epochs, "Epochs between learning-rate drops")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--lr-gamma", config.lr_gamma, "Learning-rate drop factor")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--momentum", config.momentum, "Momentum")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    cmd->add_option("--weight-decay", config.weight_decay, "L2 weight decay")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--negative-cap", negative_cap, "Sample at most N negatives per positive")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--rank-excludes-positives", config.loss.rank_excludes_positives,
                  "Ignore other positives when ranking a positive (mie-warp)");
    cmd->add_option("--seed", config.seed, "Random seed")->capture_default_str();
    cmd->add_option("--jobs", config.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_flag("--record-time", record_time, "Add wall-clock seconds to the history");
    filter.add(cmd);
    cmd->callback([this, cmd] {
      if (cmd->count("--negative-cap") > 0) config.loss.negative_cap = negative_cap;
      if (history.empty()) history = out + ".history.jsonl";
      run();
    });
  }

  std::vector<std::string> args() const {
    std::vector<std::string> a{"--labels",     labels,
                               "--bags",       bags,
                               "--out",        out,
                               "--history",    history,
                               "--loss",       loss,
                               "--margin",     num(config.loss.margin),
                               "--epochs",     std::to_string(config.epochs),
                               "--batch-size", std::to_string(config.batch_size),
                               "--lr",         num(config.initial_lr),
                               "--lr-step",    std::to_string(config.lr_step_epochs),
                               "--lr-gamma",   num(config.lr_gamma),
                               "--momentum",   num(config.momentum),
                               "--weight-decay", num(config.weight_decay),
                               "--seed",       std::to_string(config.seed),
                               "--jobs",       std::to_string(config.jobs)};
    if (config.loss.negative_cap) a.insert(a.end(), {"--negative-cap", std::to_string(*config.loss.negative_cap)});
    if (config.loss.rank_excludes_positives) a.push_back("--rank-excludes-positives");
    if (record_time) a.push_back("--record-time");
    auto f = filter.args();
    a.insert(a.end(), f.begin(), f.end());
    return a;
  }

  void run() {
    config.loss.kind = mie::parse_loss_kind(loss);
    const auto space = mie::io::read_labels(labels);
    const auto dataset = mie::io::read_bags(bags, filter.filter());
    const auto result = mie::train(dataset, space, config);
    mie::io::write_model(out, result.model);
    mie::io::write_history(history, result.history, record_time);
    for (const auto& r : result.history)
      std::cerr << "epoch " << r.epoch << "  loss " << r.mean_loss << "  lr " << r.learning_rate << "\n";

    json config_json{{"loss", loss},
                     {"margin", config.loss.margin},
                     {"negative_cap", config.loss.negative_cap ? json(*config.loss.negative_cap) : json(nullptr)},
                     {"rank_excludes_positives", config.loss.rank_excludes_positives},
                     {"epochs", config.epochs},
                     {"batch_size", config.batch_size},
                     {"initial_lr", config.initial_lr},
                     {"lr_step_epochs", config.lr_step_epochs},
                     {"lr_gamma", config.lr_gamma},
                     {"momentum", config.momentum},
                     {"weight_decay", config.weight_decay},
                     {"jobs", config.jobs},
                     {"min_side", filter.min_side},
                     {"max_aspect", filter.max_aspect}};
    write_manifest(out + ".manifest.json", "train", args(), config_json, config.seed, {labels, bags},
                   {out, history});
  }
};

// -------------------------------------------------------------- predict

struct PredictCmd {
  std::string model, labels, bags, out;
  std::size_t k = 3;
  std::size_t jobs = 1;
  bool whole_image = false;
  FilterOptions filter;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("predict", "Rank labels for each bag and localize them");
    cmd->add_option("--model", model, "Model file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--labels", labels, "Label file (TSV)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--bags", bags, "Bag file (JSONL)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--k", k, "Labels per bag")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--out", out, "Prediction file (JSONL)")->required();
    cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_flag("--whole-image", whole_image, "Use only the whole-image instance of each bag");
    filter.add(cmd);
    cmd->callback([this] { run(); });
  }

  std::vector<std::string> args() const {
    std::vector<std::string> a{"--model", model, "--labels", labels, "--bags", bags, "--k", std::to_string(k),
                               "--out", out, "--jobs", std::to_string(jobs)};
    if (whole_image) a.push_back("--whole-image");
    auto f = filter.args();
    a.insert(a.end(), f.begin(), f.end());
    return a;
  }

  void run() {
    const auto m = mie::io::read_model(model);
    const auto space = mie::io::read_labels(labels);
    auto dataset = mie::io::read_bags(bags, filter.filter());
    if (whole_image)
      for (auto& bag : dataset) bag = mie::whole_image_view(bag);
    const auto predictions = mie::predict_all(m, std::span<const mie::InstanceBag<double>>(dataset), space, k, jobs);
    mie::io::write_predictions(out, predictions);
    json config_json{{"k", k}, {"jobs", jobs}, {"whole_image", whole_image},
                     {"min_side", filter.min_side}, {"max_aspect", filter.max_aspect}};
    write_manifest(out + ".manifest.json", "predict", args(), config_json, 0, {model, labels, bags}, {out});
  }
};

// ------------------------------------------------------------- evaluate

struct EvaluateCmd {
  std::string predictions, truth_bags, labels, out;
  std::size_t k = 3;
  bool upper_bound = false;
  std::uint64_t seed = 0;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("evaluate", "Score top-k annotations (typically k = 3 or k = 5)");
    cmd->add_option("--predictions", predictions, "Prediction file (JSONL); not needed with --upper-bound")
        ->check(CLI::ExistingFile);
    cmd->add_option("--truth-bags", truth_bags, "Bag file with ground-truth labels")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--k", k, "Labels per bag, e.g. 3 or 5")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--labels", labels, "Label file defining the vocabulary (default: labels seen in the inputs)")
        ->check(CLI::ExistingFile);
    cmd->add_flag("--upper-bound", upper_bound, "Score the randomized ground-truth ceiling instead of predictions");
    cmd->add_option("--seed", seed, "Seed for --upper-bound")->capture_default_str();
    cmd->add_option("--out", out, "Report file (JSON)");
    cmd->callback([this] { run(); });
  }

  std::vector<std::string> args() const {
    std::vector<std::string> a{"--truth-bags", truth_bags, "--k", std::to_string(k), "--seed", std::to_string(seed)};
    if (!predictions.empty()) a.insert(a.end(), {"--predictions", predictions});
    if (!labels.empty()) a.insert(a.end(), {"--labels", labels});
    if (upper_bound) a.push_back("--upper-bound");
    if (!out.empty()) a.insert(a.end(), {"--out", out});
    return a;
  }

  void run() {
    if (!upper_bound && predictions.empty()) throw CLI::ValidationError("--predictions is required without --upper-bound");
    const auto bags = mie::io::read_bags(truth_bags);
    mie::LabelSets truths;
    for (const auto& bag : bags)
      if (!truths.emplace(bag.id(), bag.labels()).second)
        throw mie::Error(truth_bags + ": duplicate bag id '" + bag.id() + "'");

    mie::LabelSets predicted;
    if (!upper_bound) {
      for (auto& [id, list] : mie::io::read_prediction_labels(predictions))
        if (!predicted.emplace(id, std::move(list)).second)
          throw mie::Error(predictions + ": duplicate bag id '" + id + "'");
    }

    std::vector<std::string> vocabulary;
    if (!labels.empty()) {
      vocabulary = vocabulary_of(mie::io::read_labels(labels));
    } else {
      std::set<std::string> seen;
      for (const auto& [id, set] : truths) seen.insert(set.begin(), set.end());
      for (const auto& [id, set] : predicted) seen.insert(set.begin(), set.end());
      vocabulary.assign(seen.begin(), seen.end());
    }
    if (upper_bound) predicted = mie::upper_bound_assignments(truths, vocabulary, k, seed);

    const auto report = mie::evaluate_annotations(predicted, truths, vocabulary, k);
    std::cout << mie::render_table(report);
    if (!out.empty()) {
      mie::io::write_text(out, mie::io::report_to_string(report));
      std::vector<std::string> inputs{truth_bags};
      if (!predictions.empty()) inputs.push_back(predictions);
      if (!labels.empty()) inputs.push_back(labels);
      json config_json{{"k", k}, {"upper_bound", upper_bound}};
      write_manifest(out + ".manifest.json", "evaluate", args(), config_json, seed, inputs, {out});
    }
  }
};

// ------------------------------------------------------------- zeroshot

struct ZeroShotCmd {
  std::string model, unseen_labels, bags, out, report;
  std::size_t k = 5;
  std::size_t jobs = 1;
  bool map = false;
  FilterOptions filter;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("zeroshot", "Predict labels from a vocabulary unseen in training");
    cmd->add_option("--model", model, "Model file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--unseen-labels", unseen_labels, "Unseen label file (TSV)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--bags", bags, "Bag file (JSONL)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--k", k, "Labels per bag")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--out", out, "Prediction file (JSONL)")->required();
    cmd->add_flag("--map", map, "Report MAP@k for k in {1, 2, 5, 10} against single-label bags");
    cmd->add_option("--report", report, "MAP@k report file (JSON)");
    cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    filter.add(cmd);
    cmd->callback([this] { run(); });
  }

  std::vector<std::string> args() const {
    std::vector<std::string> a{"--model", model, "--unseen-labels", unseen_labels, "--bags", bags,
                               "--k", std::to_string(k), "--out", out, "--jobs", std::to_string(jobs)};
    if (map) a.push_back("--map");
    if (!report.empty()) a.insert(a.end(), {"--report", report});
    auto f = filter.args();
    a.insert(a.end(), f.begin(), f.end());
    return a;
  }

  void run() {
    const auto m = mie::io::read_model(model);
    const auto space = mie::io::read_labels(unseen_labels);
    const auto dataset = mie::io::read_bags(bags, filter.filter());
    const std::span<const mie::InstanceBag<double>> view(dataset);

    std::vector<mie::PredictionList> predictions(dataset.size());
    mie::detail::parallel_chunks(dataset.size(), jobs, [&](std::size_t, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) predictions[i] = mie::zero_shot_predict(m, view[i], space, k);
    });
    mie::io::write_predictions(out, predictions);
    std::vector<std::string> outputs{out};

    if (map) {
      mie::LabelSets rankings;
      std::map<std::string, std::string> truths;
      const auto full = mie::predict_all(m, view, space, space.size(), jobs);
      for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& labels = dataset[i].labels();
        if (labels.size() != 1)
          throw mie::Error(bags + ": bag '" + dataset[i].id() + "' has " + std::to_string(labels.size()) +
                           " labels; MAP@k needs exactly one");
        truths.emplace(dataset[i].id(), labels.front());
        rankings.emplace(dataset[i].id(), full[i].labels());
      }
      json doc = json::object();
      for (std::size_t at : {1, 2, 5, 10}) {
        if (at > space.size()) continue;
        const double value = mie::map_at_k(rankings, truths, at);
        doc["map@" + std::to_string(at)] = value;
        std::printf("MAP@%-3zu %6.2f\n", at, value);
      }
      if (!report.empty()) {
        mie::io::write_text(report, doc.dump(2) + "\n");
        outputs.push_back(report);
      }
    }
    json config_json{{"k", k}, {"map", map}, {"jobs", jobs},
                     {"min_side", filter.min_side}, {"max_aspect", filter.max_aspect}};
    write_manifest(out + ".manifest.json", "zeroshot", args(), config_json, 0, {model, unseen_labels, bags},
                   outputs);
  }
};

// ------------------------------------------------------------ gradcheck

struct GradCheckCmd {
  static constexpr double kTolerance = 1e-4;
  std::string labels, bags;
  std::string loss = "mie-warp";
  double margin = 0.1;
  std::size_t samples = 100;
  double step = 1e-5;
  std::uint64_t seed = 0;
  FilterOptions filter;
  int status = 0;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("gradcheck", "Compare analytic loss gradients with central differences");
    cmd->add_option("--labels", labels, "Label file (TSV)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--bags", bags, "Bag file (JSONL)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--loss", loss, "Loss: rank, mie or mie-warp")
        ->check(CLI::IsMember({"rank", "mie", "mie-warp"}))
        ->capture_default_str();
    cmd->add_option("--margin", margin, "Hinge margin")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--samples", samples, "Random evaluation points")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--step", step, "Finite-difference step")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    filter.add(cmd);
    cmd->callback([this] { run(); });
  }

  void run() {
    mie::LossConfig config;
    config.kind = mie::parse_loss_kind(loss);
    config.margin = margin;
    const auto space = mie::io::read_labels(labels);
    const auto dataset = mie::io::read_bags(bags, filter.filter());
    const auto report = mie::run_gradient_check(dataset, space, config, samples, step, seed);
    std::printf("loss %s  samples %zu  redraws %zu  max relative error %.3e\n", loss.c_str(), samples,
                report.redraws, report.max_relative_error);
    if (report.max_relative_error > kTolerance) {
      std::cerr << "gradcheck: max relative error exceeds " << kTolerance << "\n";
      status = 1;
    }
  }
};

// --------------------------------------------------------------- driver

struct Commands {
  SynthCmd synth;
  TrainCmd train;
  PredictCmd predict;
  EvaluateCmd evaluate;
  ZeroShotCmd zeroshot;
  GradCheckCmd gradcheck;
  std::string manifest;

  void add(CLI::App& app) {
    synth.add(app);
    train.add(app);
    predict.add(app);
    evaluate.add(app);
    zeroshot.add(app);
    gradcheck.add(app);
    auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay->add_option("manifest", manifest, "Manifest file")->required()->check(CLI::ExistingFile);
    app.require_subcommand(1);
  }
};

int run_app(const std::vector<std::string>& argv, bool allow_replay);

int replay(const std::string& path) {
  const auto doc = json::parse(mie::io::read_text(path));
  if (!doc.contains("command") || !doc.contains("args")) throw mie::Error(path + ": not a run manifest");
  for (const auto& input : doc.value("inputs", json::array())) {
    const auto file = input.at("path").get<std::string>();
    if (mie::io::sha256_file(file) != input.at("sha256").get<std::string>())
      throw mie::Error(path + ": input '" + file + "' changed since the manifest was written");
  }
  std::vector<std::string> argv{"mie", doc["command"].get<std::string>()};
  for (const auto& a : doc["args"]) argv.push_back(a.get<std::string>());
  return run_app(argv, false);
}

int run_app(const std::vector<std::string>& argv, bool allow_replay) {
  CLI::App app{"Multi-instance visual-semantic embedding toolkit"};
  app.set_version_flag("--version", kVersion);
  Commands commands;
  commands.add(app);
  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (app.got_subcommand("replay")) {
    if (!allow_replay) throw mie::Error("a manifest cannot replay another replay");
    return replay(commands.manifest);
  }
  return commands.gradcheck.status;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_app(std::vector<std::string>(argv, argv + argc), true);
  } catch (const std::exception& e) {
    std::cerr << "mie: " << e.what() << "\n";
    return 1;
  }
}
