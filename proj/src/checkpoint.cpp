// Copyright 2026 The DGE Authors
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

#include "dge/checkpoint.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dge/error.hpp"

namespace dge {

namespace {

constexpr int kFormatVersion = 1;

nlohmann::ordered_json spec_json(const EncoderSpec& s) {
  nlohmann::ordered_json j;
  j["kind"] = encoder_kind_name(s.kind);
  j["input_dim"] = s.input_dim;
  j["hidden_dim"] = s.hidden_dim;
  j["output_dim"] = s.output_dim;
  return j;
}

EncoderSpec spec_from_json(const nlohmann::json& j) {
  EncoderSpec s;
  s.kind = parse_encoder_kind(j.at("kind").get<std::string>());
  s.input_dim = j.at("input_dim").get<std::size_t>();
  s.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  s.output_dim = j.at("output_dim").get<std::size_t>();
  return s;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot open for writing: " + path);
  for (const auto& l : lines) out << l << '\n';
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open: " + path);
  std::vector<std::string> lines;
  std::string l;
  while (std::getline(in, l)) lines.push_back(l);
  return lines;
}

}  // namespace

void write_loss_csv(std::ostream& out, const std::vector<double>& trace) {
  out << "epoch,mean_loss\n";
  char buf[64];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i + 1, trace[i]);
    out << buf;
  }
}

void write_embeddings_tsv(std::ostream& out, const DenseMatrix& z,
                          const std::vector<std::string>& names) {
  require(names.size() == z.rows(), ErrorKind::kInvalidArgument,
          "write_embeddings_tsv: name count != row count");
  char buf[32];
  for (std::size_t r = 0; r < z.rows(); ++r) {
    out << names[r];
    for (double v : z.row(r)) {
      std::snprintf(buf, sizeof(buf), "\t%.17g", v);
      out << buf;
    }
    out << '\n';
  }
}

void save_checkpoint(const std::string& dir, const Checkpoint& ckpt) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const TrainedModel& m = ckpt.model;

  nlohmann::ordered_json h;
  h["format_version"] = kFormatVersion;
  h["model"] = m.config.model;
  h["num_objects"] = m.object_spec.input_dim;
  h["num_tags"] = m.tag_spec.input_dim;
  h["object_encoder"] = spec_json(m.object_spec);
  h["tag_encoder"] = spec_json(m.tag_spec);
  h["seed"] = m.config.seed;
  h["epoch"] = m.epochs_completed;
  h["steps"] = m.steps;
  h["config"] = to_json(m.config);
  {
    std::ofstream out(dir + "/header.json", std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::kIo, "cannot write checkpoint header in " + dir);
    out << h.dump(2) << '\n';
  }
  for (std::size_t s = 0; s < 4; ++s) {
    save_matrix(dir + "/" + std::string(kParamNames[s]) + ".bin", m.params.mats[s]);
  }
  save_matrix(dir + "/Z_O.bin", m.z_object);
  save_matrix(dir + "/Z_T.bin", m.z_tag);
  {
    std::ofstream out(dir + "/loss.csv", std::ios::binary);
    write_loss_csv(out, m.loss_trace);
  }
  write_lines(dir + "/objects.txt", ckpt.object_names);
  write_lines(dir + "/tags.txt", ckpt.tag_names);
  std::ofstream out(dir + "/train_pairs.tsv", std::ios::binary);
  for (const auto& [o, t] : m.train_pairs) out << o << '\t' << t << '\n';
  require(static_cast<bool>(out), ErrorKind::kIo, "checkpoint write failed in " + dir);
}

Checkpoint load_checkpoint(const std::string& dir) {
  std::ifstream in(dir + "/header.json", std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "missing checkpoint: " + dir + "/header.json");
  Checkpoint c;
  TrainedModel& m = c.model;
  try {
    const auto h = nlohmann::json::parse(in);
    require(h.at("format_version").get<int>() == kFormatVersion, ErrorKind::kParse,
            "unsupported checkpoint format version");
    m.config = config_from_json(h.at("config"));
    m.object_spec = spec_from_json(h.at("object_encoder"));
    m.tag_spec = spec_from_json(h.at("tag_encoder"));
    m.epochs_completed = h.at("epoch").get<std::size_t>();
    m.steps = h.at("steps").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, "checkpoint header: " + std::string(e.what()));
  }
  for (std::size_t s = 0; s < 4; ++s) {
    m.params.mats[s] = load_matrix(dir + "/" + std::string(kParamNames[s]) + ".bin");
  }
  m.z_object = load_matrix(dir + "/Z_O.bin");
  m.z_tag = load_matrix(dir + "/Z_T.bin");

  const auto loss_lines = read_lines(dir + "/loss.csv");
  for (std::size_t i = 1; i < loss_lines.size(); ++i) {
    const auto comma = loss_lines[i].find(',');
    if (comma == std::string::npos) continue;
    m.loss_trace.push_back(std::stod(loss_lines[i].substr(comma + 1)));
  }
  c.object_names = read_lines(dir + "/objects.txt");
  c.tag_names = read_lines(dir + "/tags.txt");
  require(c.object_names.size() == m.z_object.rows() && c.tag_names.size() == m.z_tag.rows(),
          ErrorKind::kData, "checkpoint: name lists do not match embedding rows");
  for (const auto& line : read_lines(dir + "/train_pairs.tsv")) {
    std::istringstream ls(line);
    EntityId o = 0;
    EntityId t = 0;
    require(static_cast<bool>(ls >> o >> t), ErrorKind::kParse, "checkpoint: bad train_pairs line");
    m.train_pairs.emplace_back(o, t);
  }
  return c;
}

}  // namespace dge
