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

#ifndef MIE_IO_HPP_
#define MIE_IO_HPP_

#include <istream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mie/bags.hpp"
#include "mie/embedding.hpp"
#include "mie/inference.hpp"
#include "mie/metrics.hpp"
#include "mie/semantic_space.hpp"
#include "mie/trainer.hpp"

namespace mie::io {

// Label file: one label per line, `name\tv1\t...\tvd`, no header.
LabelSpace<double> parse_labels(std::istream& in, const std::string& source);
LabelSpace<double> read_labels(const std::string& path);
void write_labels(const std::string& path, const LabelSpace<double>& space);

// Bag file: JSON Lines of {"id", "labels", "instances": [{"geom", "feat"}]}.
// Instance 0 must be the full frame; later instances go through the filter.
std::vector<InstanceBag<double>> parse_bags(std::istream& in, const std::string& source,
                                            const RegionFilter& filter = {});
std::vector<InstanceBag<double>> read_bags(const std::string& path, const RegionFilter& filter = {});
void write_bags(const std::string& path, std::span<const InstanceBag<double>> bags);

// Model file: {"format_version": 1, "feature_dim", "semantic_dim", "weight"}
// with the weight flattened row-major.
inline constexpr int kModelFormatVersion = 1;
std::string model_to_string(const EmbeddingModel<double>& model);
EmbeddingModel<double> model_from_string(const std::string& text, const std::string& source);
EmbeddingModel<double> read_model(const std::string& path);
void write_model(const std::string& path, const EmbeddingModel<double>& model);

// Prediction file: JSON Lines of {"id", "predictions": [{"label", "distance",
// "instance", "geom"}]} in rank order.
void write_predictions(const std::string& path, std::span<const PredictionList> predictions);
std::vector<std::pair<std::string, std::vector<std::string>>> read_prediction_labels(const std::string& path);

// One JSON object per epoch; wall-clock seconds only when requested.
void write_history(const std::string& path, const TrainHistory& history, bool include_seconds);

std::string report_to_string(const MetricsReport& report);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace mie::io

#endif  // MIE_IO_HPP_
