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

#include "mie/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "json.hpp"

namespace mie::io {
namespace {

using nlohmann::json;

std::string where(const std::string& source, std::size_t line) { return source + ":" + std::to_string(line) + ": "; }

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.is_open(), path + ": cannot open for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.is_open(), path + ": cannot open for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  require(out.good(), path + ": write failed");
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  require(ec == std::errc(), "cannot format number");
  return std::string(buf.data(), end);
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

double parse_double(std::string_view field, const std::string& context) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  require(ec == std::errc() && ptr == field.data() + field.size() && !field.empty(),
          context + "'" + std::string(field) + "' is not a decimal number");
  return value;
}

Vector<double> json_vector(const json& array, const std::string& context) {
  require(array.is_array(), context + "expected an array of numbers");
  Vector<double> v(static_cast<Index>(array.size()));
  for (std::size_t i = 0; i < array.size(); ++i) {
    require(array[i].is_number(), context + "expected an array of numbers");
    v(static_cast<Index>(i)) = array[i].get<double>();
  }
  return v;
}

RegionGeometry json_geometry(const json& geom, const std::string& context) {
  require(geom.is_array() && geom.size() == 4, context + "geom must be [x0, y0, x1, y1]");
  const auto v = json_vector(geom, context);
  RegionGeometry g{v(0), v(1), v(2), v(3)};
  require(g.valid(), context + "geom must satisfy 0 <= x0 < x1 <= 1 and 0 <= y0 < y1 <= 1");
  return g;
}

json geometry_json(const RegionGeometry& g) { return json::array({g.x0, g.y0, g.x1, g.y1}); }

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fn(line, number);
  }
}

}  // namespace

LabelSpace<double> parse_labels(std::istream& in, const std::string& source) {
  std::vector<LabelRecord<double>> records;
  std::size_t expected_fields = 0;
  std::size_t trailing_blank = 0;
  for_each_line(in, [&](const std::string& line, std::size_t number) {
    if (line.empty()) {
      ++trailing_blank;
      return;
    }
    require(trailing_blank == 0, where(source, number - 1) + "blank line inside the label file");
    const auto fields = split_tabs(line);
    if (expected_fields == 0) expected_fields = fields.size();
    require(fields.size() >= 2, where(source, number) + "expected `name<TAB>v1<TAB>...`");
    require(fields.size() == expected_fields, where(source, number) + "has " + std::to_string(fields.size()) +
                                                  " fields, first line has " + std::to_string(expected_fields));
    LabelRecord<double> record{std::string(fields[0]), Vector<double>(static_cast<Index>(fields.size() - 1))};
    for (std::size_t i = 1; i < fields.size(); ++i)
      record.vector(static_cast<Index>(i - 1)) = parse_double(fields[i], where(source, number));
    records.push_back(std::move(record));
  });
  require(!records.empty(), source + ": no labels");
  try {
    return load_label_space(records);
  } catch (const Error& e) {
    throw Error(source + ": " + e.what());
  }
}

LabelSpace<double> read_labels(const std::string& path) {
  auto in = open_input(path);
  return parse_labels(in, path);
}

void write_labels(const std::string& path, const LabelSpace<double>& space) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < space.size(); ++i) {
    out << space.name(i);
    const auto v = space.vector(i);
    for (Index d = 0; d < v.size(); ++d) out << '\t' << format_double(v(d));
    out << '\n';
  }
  finish(out, path);
}

std::vector<InstanceBag<double>> parse_bags(std::istream& in, const std::string& source, const RegionFilter& filter) {
  std::vector<InstanceBag<double>> bags;
  for_each_line(in, [&](const std::string& line, std::size_t number) {
    if (line.find_first_not_of(" \t") == std::string::npos) return;
    const std::string at = where(source, number);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(at + "malformed JSON: " + e.what());
    }
    require(record.is_object(), at + "expected a JSON object");
    require(record.contains("id") && record["id"].is_string(), at + "missing string field 'id'");
    require(record.contains("instances") && record["instances"].is_array() && !record["instances"].empty(),
            at + "missing non-empty array 'instances'");

    std::vector<std::string> labels;
    if (record.contains("labels")) {
      require(record["labels"].is_array(), at + "'labels' must be an array of strings");
      for (const auto& l : record["labels"]) {
        require(l.is_string(), at + "'labels' must be an array of strings");
        labels.push_back(l.get<std::string>());
      }
    }

    const auto& instances = record["instances"];
    std::vector<Region<double>> regions;
    Vector<double> whole;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const std::string ctx = at + "instance " + std::to_string(i) + ": ";
      const auto& inst = instances[i];
      require(inst.is_object() && inst.contains("geom") && inst.contains("feat"), ctx + "needs 'geom' and 'feat'");
      const auto geometry = json_geometry(inst["geom"], ctx);
      auto feature = json_vector(inst["feat"], ctx);
      if (i == 0) {
        require(geometry.is_full_frame(), ctx + "instance 0 must be the full frame [0,0,1,1]");
        whole = std::move(feature);
      } else {
        regions.push_back({std::move(feature), geometry});
      }
    }
    try {
      bags.push_back(build_bag<double>(record["id"].get<std::string>(), whole, regions, filter, std::move(labels)));
    } catch (const Error& e) {
      throw Error(at + e.what());
    }
  });
  return bags;
}

std::vector<InstanceBag<double>> read_bags(const std::string& path, const RegionFilter& filter) {
  auto in = open_input(path);
  return parse_bags(in, path, filter);
}

void write_bags(const std::string& path, std::span<const InstanceBag<double>> bags) {
  auto out = open_output(path);
  for (const auto& bag : bags) {
    json instances = json::array();
    for (Index c = 0; c < bag.size(); ++c) {
      const auto f = bag.feature(c);
      instances.push_back({{"geom", geometry_json(bag.geometry(c))},
                           {"feat", std::vector<double>(f.data(), f.data() + f.size())}});
    }
    out << json{{"id", bag.id()}, {"labels", bag.labels()}, {"instances", std::move(instances)}}.dump() << '\n';
  }
  finish(out, path);
}

std::string model_to_string(const EmbeddingModel<double>& model) {
  const auto& w = model.weight();
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(w.size()));
  for (Index r = 0; r < w.rows(); ++r)
    for (Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
  json doc{{"format_version", kModelFormatVersion},
           {"feature_dim", model.feature_dim()},
           {"semantic_dim", model.semantic_dim()},
           {"weight", std::move(flat)}};
  return doc.dump() + "\n";
}

EmbeddingModel<double> model_from_string(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(source + ": malformed JSON: " + e.what());
  }
  require(doc.is_object(), source + ": expected a JSON object");
  for (const char* key : {"format_version", "feature_dim", "semantic_dim"})
    require(doc.contains(key) && doc[key].is_number_integer(), source + ": missing integer field '" + key + "'");
  require(doc["format_version"].get<int>() == kModelFormatVersion,
          source + ": unsupported format_version " + doc["format_version"].dump());
  const auto features = doc["feature_dim"].get<long long>();
  const auto semantic = doc["semantic_dim"].get<long long>();
  require(features >= 1 && semantic >= 1, source + ": dimensions must be positive");
  require(doc.contains("weight") && doc["weight"].is_array(), source + ": missing array field 'weight'");
  const auto flat = json_vector(doc["weight"], source + ": weight: ");
  require(flat.size() == features * semantic, source + ": weight has " + std::to_string(flat.size()) +
                                                  " entries, expected " + std::to_string(features * semantic));
  Matrix<double> w(semantic, features);
  for (Index r = 0; r < semantic; ++r)
    for (Index c = 0; c < features; ++c) w(r, c) = flat(r * features + c);
  try {
    return EmbeddingModel<double>(std::move(w));
  } catch (const Error& e) {
    throw Error(source + ": " + e.what());
  }
}

EmbeddingModel<double> read_model(const std::string& path) { return model_from_string(read_text(path), path); }

void write_model(const std::string& path, const EmbeddingModel<double>& model) {
  write_text(path, model_to_string(model));
}

void write_predictions(const std::string& path, std::span<const PredictionList> predictions) {
  auto out = open_output(path);
  for (const auto& list : predictions) {
    json entries = json::array();
    for (const auto& e : list.entries)
      entries.push_back(
          {{"label", e.label}, {"distance", e.distance}, {"instance", e.instance}, {"geom", geometry_json(e.geometry)}});
    out << json{{"id", list.bag_id}, {"predictions", std::move(entries)}}.dump() << '\n';
  }
  finish(out, path);
}

std::vector<std::pair<std::string, std::vector<std::string>>> read_prediction_labels(const std::string& path) {
  auto in = open_input(path);
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for_each_line(in, [&](const std::string& line, std::size_t number) {
    if (line.find_first_not_of(" \t") == std::string::npos) return;
    const std::string at = where(path, number);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(at + "malformed JSON: " + e.what());
    }
    require(record.is_object() && record.contains("id") && record["id"].is_string(), at + "missing string field 'id'");
    require(record.contains("predictions") && record["predictions"].is_array(), at + "missing array 'predictions'");
    std::vector<std::string> labels;
    for (const auto& p : record["predictions"]) {
      require(p.is_object() && p.contains("label") && p["label"].is_string(), at + "prediction without 'label'");
      labels.push_back(p["label"].get<std::string>());
    }
    out.emplace_back(record["id"].get<std::string>(), std::move(labels));
  });
  return out;
}

void write_history(const std::string& path, const TrainHistory& history, bool include_seconds) {
  auto out = open_output(path);
  for (const auto& record : history) {
    json line{{"epoch", record.epoch}, {"mean_loss", record.mean_loss}, {"learning_rate", record.learning_rate}};
    if (include_seconds) line["seconds"] = record.seconds;
    out << line.dump() << '\n';
  }
  finish(out, path);
}

std::string report_to_string(const MetricsReport& report) {
  json doc{{"k", report.k},
           {"per_class_recall", report.per_class_recall},
           {"per_class_precision", report.per_class_precision},
           {"overall_recall", report.overall_recall},
           {"overall_precision", report.overall_precision},
           {"n_plus", report.n_plus},
           {"recall_skipped_labels", report.recall_skipped},
           {"precision_skipped_labels", report.precision_skipped},
           {"vocabulary_size", report.vocabulary_size},
           {"num_bags", report.num_bags}};
  return doc.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  finish(out, path);
}

std::string read_text(const std::string& path) {
  auto in = open_input(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string sha256_file(const std::string& path) {
  auto in = open_input(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  require(ctx && EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) == 1, "sha256: cannot initialize digest");
  std::array<char, 1 << 16> chunk{};
  while (in) {
    in.read(chunk.data(), chunk.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), chunk.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

}  // namespace mie::io
