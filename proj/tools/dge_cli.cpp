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

// Command-line front end over the C API.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dge/dge.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

constexpr const char* kDataRootEnv = "DGE_DATA_ROOT";

struct Failure {
  dge_status status;
  std::string message;
};

int exit_code(dge_status s) {
  switch (s) {
    case DGE_OK: return kExitOk;
    case DGE_ERR_INVALID_ARGUMENT: return kExitUsage;
    case DGE_ERR_NUMERIC: return kExitNumeric;
    default: return kExitData;
  }
}

void check(dge_status s) {
  if (s != DGE_OK) throw Failure{s, dge_last_error()};
}

[[noreturn]] void usage_error(const std::string& msg) {
  throw Failure{DGE_ERR_INVALID_ARGUMENT, msg};
}

// Owning wrappers for the C handles.
struct KgFree { void operator()(dge_kg* p) const { dge_kg_free(p); } };
struct SplitFree { void operator()(dge_split* p) const { dge_split_free(p); } };
struct GraphsFree { void operator()(dge_graphs* p) const { dge_graphs_free(p); } };
struct ModelFree { void operator()(dge_model* p) const { dge_model_free(p); } };
struct ReportFree { void operator()(dge_report* p) const { dge_report_free(p); } };
using KgPtr = std::unique_ptr<dge_kg, KgFree>;
using SplitPtr = std::unique_ptr<dge_split, SplitFree>;
using GraphsPtr = std::unique_ptr<dge_graphs, GraphsFree>;
using ModelPtr = std::unique_ptr<dge_model, ModelFree>;
using ReportPtr = std::unique_ptr<dge_report, ReportFree>;

std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  dge_string_free(s);
  return out;
}

// Relative inputs that do not exist under the working directory are looked
// up under $DGE_DATA_ROOT.
std::string resolve_input(const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute() || fs::exists(p)) return p;
  if (const char* root = std::getenv(kDataRootEnv); root != nullptr && *root != '\0') {
    const auto candidate = fs::path(root) / p;
    if (fs::exists(candidate)) return candidate.string();
  }
  return p;
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string digest(const std::string& path) {
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(path)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& f : files) h = (h ^ fnv1a_file(f.string())) * 0x100000001b3ULL;
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
  if (!fs::exists(path)) return "missing";
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a_file(path)));
  return buf;
}

std::string utc_now() {
  const auto t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{DGE_ERR_IO, "cannot open for writing: " + path};
  out << text;
  if (!out) throw Failure{DGE_ERR_IO, "write failed: " + path};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{DGE_ERR_IO, "cannot open: " + path};
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Failure{DGE_ERR_PARSE, path + ": " + e.what()};
  }
}

// Run manifest: written when a command starts and rewritten when it ends.
class Manifest {
 public:
  Manifest(std::string command, std::string path) : path_(std::move(path)) {
    j_["command"] = std::move(command);
    j_["version"] = std::string("dge ") + dge_version();
    j_["status"] = "running";
    j_["started"] = utc_now();
    j_["argv"] = json::array();
    j_["config"] = json::object();
    j_["seeds"] = json::object();
    j_["inputs"] = json::object();
    j_["outputs"] = json::array();
    start_ = std::chrono::steady_clock::now();
  }

  void argv(int argc, char** argv) {
    for (int i = 0; i < argc; ++i) j_["argv"].push_back(argv[i]);
  }
  void input(const std::string& name, const std::string& path) {
    j_["inputs"][name] = json{{"path", path}, {"fnv1a64", digest(path)}};
  }
  void output(const std::string& path) { j_["outputs"].push_back(path); }
  void seed(const std::string& name, std::uint64_t v) { j_["seeds"][name] = v; }
  void config(const json& c) { j_["config"] = c; }
  json& extra() { return j_; }

  void begin() { flush(); }
  void finish(int code, const std::string& error = {}) {
    j_["status"] = code == kExitOk ? "ok" : "failed";
    j_["exit_code"] = code;
    if (!error.empty()) j_["error"] = error;
    j_["finished"] = utc_now();
    j_["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    flush();
  }
  const std::string& path() const { return path_; }

 private:
  void flush() {
    if (path_.empty()) return;
    write_text(path_, j_.dump(2) + "\n");
  }

  std::string path_;
  json j_;
  std::chrono::steady_clock::time_point start_;
};

// Training flags shared by train, sweep and ablate. Unset flags leave the
// config file (or the defaults) alone.
struct TrainFlags {
  std::string config_path;
  std::string profile;
  std::string model;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> lr;
  std::optional<std::size_t> negatives;
  std::optional<double> k_object;
  std::optional<double> k_tag;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> checkpoint_interval;

  void add_to(CLI::App* app) {
    app->add_option("--config", config_path, "Config JSON; flags below override its keys");
    app->add_option("--profile", profile, "Preset: movielens, lastfm or steam");
    app->add_option("--model", model, "dge, so-ge, st-ge, skipgram or mf");
    app->add_option("--epochs", epochs, "Training epochs");
    app->add_option("--batch-size", batch_size, "Positive pairs per mini-batch");
    app->add_option("--lr", lr, "Adam learning rate");
    app->add_option("--negatives", negatives, "Negative samples per positive (K)");
    app->add_option("--k-object", k_object, "SPPMI shift of the object graph");
    app->add_option("--k-tag", k_tag, "SPPMI shift of the tag graph");
    app->add_option("--seed", seed, "Root seed");
    app->add_option("--checkpoint-interval", checkpoint_interval,
                    "Snapshot every N epochs (0 disables)");
  }

  json overlay() const {
    json j = config_path.empty() ? json::object() : read_json_file(resolve_input(config_path));
    if (!j.is_object()) usage_error("config file must hold a JSON object");
    if (!profile.empty()) j["profile"] = profile;
    if (!model.empty()) j["model"] = model;
    if (epochs) j["epochs"] = *epochs;
    if (batch_size) j["batch_size"] = *batch_size;
    if (lr) j["learning_rate"] = *lr;
    if (negatives) j["negatives"] = *negatives;
    if (k_object) j["k_object"] = *k_object;
    if (k_tag) j["k_tag"] = *k_tag;
    if (seed) j["seed"] = *seed;
    if (checkpoint_interval) j["checkpoint_interval"] = *checkpoint_interval;
    return j;
  }
};

json resolve(const json& overlay) {
  char* out = nullptr;
  check(dge_config_resolve(overlay.dump().c_str(), &out));
  return json::parse(take(out));
}

KgPtr load_kg(const std::string& path) {
  dge_kg* kg = nullptr;
  check(dge_kg_load(path.c_str(), &kg));
  return KgPtr(kg);
}

SplitPtr load_or_make_split(const dge_kg* kg, const std::string& split_path, double ratio,
                            std::uint64_t seed) {
  dge_split* s = nullptr;
  if (!split_path.empty()) {
    check(dge_split_load(kg, split_path.c_str(), &s));
  } else {
    check(dge_split_make(kg, ratio, seed, &s));
  }
  return SplitPtr(s);
}

struct Progress {
  bool quiet = false;
  std::size_t every = 10;
  std::size_t total = 0;
};

void on_epoch(size_t epoch, double loss, void* user) {
  const auto* p = static_cast<const Progress*>(user);
  if (p->quiet) return;
  if (epoch == 1 || epoch == p->total || (p->every > 0 && epoch % p->every == 0)) {
    std::fprintf(stderr, "epoch %zu/%zu  loss %.6f\n", epoch, p->total, loss);
  }
}

ModelPtr run_training(const dge_kg* kg, const dge_split* split, const json& config,
                      const std::string& ckpt_dir, Progress progress) {
  progress.total = config.at("epochs").get<std::size_t>();
  dge_model* m = nullptr;
  check(dge_train(kg, split, config.dump().c_str(), ckpt_dir.empty() ? nullptr : ckpt_dir.c_str(),
                  on_epoch, &progress, &m));
  return ModelPtr(m);
}

ReportPtr run_eval(const dge_model* m, const dge_split* split, const std::vector<std::size_t>& ks,
                   bool include_train) {
  dge_report* r = nullptr;
  check(dge_evaluate(m, split, ks.data(), ks.size(), include_train ? 0 : 1, &r));
  return ReportPtr(r);
}

void write_report(const dge_report* r, const dge_kg* kg, const std::string& dir,
                  Manifest& manifest) {
  char* s = nullptr;
  check(dge_report_json(r, &s));
  write_text(dir + "/report.json", take(s));
  check(dge_report_text(r, &s));
  write_text(dir + "/report.txt", take(s));
  check(dge_report_csv(r, kg, &s));
  write_text(dir + "/report.csv", take(s));
  for (const char* f : {"/report.json", "/report.txt", "/report.csv"}) manifest.output(dir + f);
}

std::string manifest_path(const std::string& explicit_path, const std::string& out,
                          bool out_is_dir) {
  if (!explicit_path.empty()) return explicit_path;
  if (out.empty()) return {};
  return out_is_dir ? out + "/manifest.json" : out + ".manifest.json";
}

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-graph embedding for tag recommendation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("dge ") + dge_version());
  std::string manifest_arg;
  app.add_option("--manifest", manifest_arg, "Run manifest path (default: next to the output)");
  app.footer(std::string("Relative input paths fall back to $") + kDataRootEnv + ".");

  // convert
  auto* convert = app.add_subcommand("convert", "Raw dataset or synthetic spec to a triple file");
  std::string conv_dataset;
  std::string conv_raw;
  std::string conv_out;
  std::string conv_stats;
  std::string conv_spec;
  std::string conv_split;
  convert->add_option("--dataset", conv_dataset, "movielens, lastfm, steam or synthetic")
      ->required()
      ->check(CLI::IsMember({"movielens", "lastfm", "steam", "synthetic"}));
  convert->add_option("--raw", conv_raw, "Directory of the raw dataset files");
  convert->add_option("--spec", conv_spec, "Synthetic spec JSON file (synthetic only)");
  convert->add_option("--split-out", conv_split, "Write the planted split (synthetic only)");
  convert->add_option("--out", conv_out, "Output triple file")->required();
  convert->add_option("--stats", conv_stats, "Stats JSON (default: <out>.stats.json)");

  // build-graphs
  auto* graphs = app.add_subcommand("build-graphs", "Build the SPPMI object and tag graphs");
  std::string g_kg;
  std::string g_split;
  std::string g_out;
  double g_ko = 0.1;
  double g_kt = 1.0;
  graphs->add_option("--kg", g_kg, "Triple file")->required();
  graphs->add_option("--split", g_split, "Split file; the tag graph uses its training pairs");
  graphs->add_option("--k-object", g_ko, "SPPMI shift of the object graph")->capture_default_str();
  graphs->add_option("--k-tag", g_kt, "SPPMI shift of the tag graph")->capture_default_str();
  graphs->add_option("--out", g_out, "Output directory")->required();

  // train
  auto* train = app.add_subcommand("train", "Train a model and write a checkpoint");
  TrainFlags t_flags;
  std::string t_kg;
  std::string t_split;
  std::string t_out;
  double t_ratio = 0.8;
  bool t_quiet = false;
  std::size_t t_log_every = 10;
  train->add_option("--kg", t_kg, "Triple file")->required();
  train->add_option("--split", t_split, "Split file (default: a fresh split from --ratio)");
  train->add_option("--ratio", t_ratio, "Training share of a fresh split")->capture_default_str();
  train->add_option("--out", t_out, "Checkpoint directory")->required();
  train->add_flag("--quiet", t_quiet, "No per-epoch progress");
  train->add_option("--log-every", t_log_every, "Progress interval in epochs")
      ->capture_default_str();
  t_flags.add_to(train);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Recall@k / NDCG@k of a checkpoint");
  std::string e_ckpt;
  std::string e_kg;
  std::string e_split;
  std::string e_out;
  std::vector<std::size_t> e_ks{3, 5};
  bool e_include_train = false;
  evaluate->add_option("--checkpoint", e_ckpt, "Checkpoint directory")->required();
  evaluate->add_option("--kg", e_kg, "Triple file the model was trained on")->required();
  evaluate->add_option("--split", e_split, "Split file (default: <checkpoint>/split.tsv)");
  evaluate->add_option("--k", e_ks, "Cutoffs")->delimiter(',')->capture_default_str();
  evaluate->add_flag("--include-train", e_include_train, "Keep training tags in the ranking");
  evaluate->add_option("--out", e_out, "Report directory (default: print text)");

  // predict
  auto* predict = app.add_subcommand("predict", "Top-k tags for named objects");
  std::string p_ckpt;
  std::vector<std::string> p_objects;
  std::size_t p_k = 5;
  bool p_include_train = false;
  bool p_json = false;
  predict->add_option("--checkpoint", p_ckpt, "Checkpoint directory")->required();
  predict->add_option("--object", p_objects, "Object name (repeatable)")->required();
  predict->add_option("--k", p_k, "Tags per object")->capture_default_str();
  predict->add_flag("--include-train", p_include_train, "Allow tags seen in training");
  predict->add_flag("--json", p_json, "Print JSON instead of text");

  // export-embeddings
  auto* exporter = app.add_subcommand("export-embeddings", "Write Z_O and Z_T");
  std::string x_ckpt;
  std::string x_out;
  std::string x_format = "both";
  exporter->add_option("--checkpoint", x_ckpt, "Checkpoint directory")->required();
  exporter->add_option("--out", x_out, "Output directory")->required();
  exporter->add_option("--format", x_format, "tsv, bin or both")
      ->check(CLI::IsMember({"tsv", "bin", "both"}))
      ->capture_default_str();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Train and evaluate on subsampled training data");
  TrainFlags s_flags;
  std::string s_kg;
  std::string s_split;
  std::string s_out;
  double s_ratio = 0.8;
  std::vector<double> s_levels{0.2, 0.4, 0.6, 0.8};
  sweep->add_option("--kg", s_kg, "Triple file")->required();
  sweep->add_option("--split", s_split, "Split file (default: a fresh split from --ratio)");
  sweep->add_option("--ratio", s_ratio, "Training share of a fresh split")->capture_default_str();
  sweep->add_option("--levels", s_levels, "Fractions of the training pairs kept")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--out", s_out, "Output directory")->required();
  s_flags.add_to(sweep);

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Train and evaluate several models on one split");
  TrainFlags a_flags;
  std::string a_kg;
  std::string a_split;
  std::string a_out;
  double a_ratio = 0.8;
  std::string a_models = "dge,so-ge,st-ge,skipgram,mf";
  ablate->add_option("--kg", a_kg, "Triple file")->required();
  ablate->add_option("--split", a_split, "Split file (default: a fresh split from --ratio)");
  ablate->add_option("--ratio", a_ratio, "Training share of a fresh split")->capture_default_str();
  ablate->add_option("--models", a_models, "Comma-separated model names")->capture_default_str();
  ablate->add_option("--out", a_out, "Output directory")->required();
  a_flags.add_to(ablate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  std::unique_ptr<Manifest> manifest;
  try {
    if (*convert) {
      manifest = std::make_unique<Manifest>("convert", manifest_path(manifest_arg, conv_out, false));
      manifest->argv(argc, argv);
      manifest->extra()["dataset"] = conv_dataset;
      dge_kg* raw = nullptr;
      SplitPtr planted;
      if (conv_dataset == "synthetic") {
        json spec = conv_spec.empty() ? json::object() : read_json_file(resolve_input(conv_spec));
        if (!conv_spec.empty()) manifest->input("spec", resolve_input(conv_spec));
        manifest->config(spec);
        manifest->seed("synthetic", spec.value("seed", std::uint64_t{0}));
        manifest->begin();
        dge_split* s = nullptr;
        check(dge_kg_synthetic(spec.dump().c_str(), &raw, &s));
        planted.reset(s);
      } else {
        if (conv_raw.empty()) usage_error("--raw is required for " + conv_dataset);
        if (!conv_split.empty() || !conv_spec.empty()) {
          usage_error("--spec and --split-out apply to the synthetic dataset only");
        }
        const auto raw_dir = resolve_input(conv_raw);
        manifest->input("raw", raw_dir);
        manifest->begin();
        check(dge_kg_convert(conv_dataset.c_str(), raw_dir.c_str(), &raw));
      }
      KgPtr kg(raw);
      check(dge_kg_save(kg.get(), conv_out.c_str()));
      manifest->output(conv_out);
      char* stats = nullptr;
      check(dge_kg_stats_json(kg.get(), &stats));
      const auto stats_path = conv_stats.empty() ? conv_out + ".stats.json" : conv_stats;
      const auto stats_text = take(stats);
      write_text(stats_path, stats_text);
      manifest->output(stats_path);
      if (!conv_split.empty()) {
        check(dge_split_save(planted.get(), kg.get(), conv_split.c_str()));
        manifest->output(conv_split);
      }
      std::cout << stats_text;
    } else if (*graphs) {
      fs::create_directories(g_out);
      manifest = std::make_unique<Manifest>("build-graphs", manifest_path(manifest_arg, g_out, true));
      manifest->argv(argc, argv);
      const auto kg_path = resolve_input(g_kg);
      manifest->input("kg", kg_path);
      if (!g_split.empty()) manifest->input("split", resolve_input(g_split));
      manifest->config(json{{"k_object", g_ko}, {"k_tag", g_kt}});
      manifest->begin();
      auto kg = load_kg(kg_path);
      SplitPtr split;
      if (!g_split.empty()) split = load_or_make_split(kg.get(), resolve_input(g_split), 0.8, 0);
      dge_graphs* gr = nullptr;
      check(dge_graphs_build(kg.get(), split.get(), g_ko, g_kt, &gr));
      GraphsPtr owned(gr);
      check(dge_graphs_save(gr, g_out.c_str()));
      for (const char* f : {"object_graph.coo", "object_graph.json", "tag_graph.coo", "tag_graph.json"}) {
        manifest->output(g_out + "/" + f);
      }
      std::size_t on = 0;
      std::size_t tn = 0;
      check(dge_graphs_nnz(gr, &on, &tn));
      std::cout << "object graph nnz " << on << "\ntag graph nnz " << tn << "\n";
    } else if (*train) {
      fs::create_directories(t_out);
      manifest = std::make_unique<Manifest>("train", manifest_path(manifest_arg, t_out, true));
      manifest->argv(argc, argv);
      const auto config = resolve(t_flags.overlay());
      const auto seed = config.at("seed").get<std::uint64_t>();
      manifest->config(config);
      manifest->seed("root", seed);
      const auto kg_path = resolve_input(t_kg);
      manifest->input("kg", kg_path);
      if (!t_split.empty()) manifest->input("split", resolve_input(t_split));
      if (!t_flags.config_path.empty()) manifest->input("config", resolve_input(t_flags.config_path));
      manifest->begin();
      auto kg = load_kg(kg_path);
      auto split = load_or_make_split(kg.get(), resolve_input(t_split), t_ratio, seed);
      check(dge_split_save(split.get(), kg.get(), (t_out + "/split.tsv").c_str()));
      auto model = run_training(kg.get(), split.get(), config, t_out, {t_quiet, t_log_every, 0});
      check(dge_model_save(model.get(), t_out.c_str()));
      manifest->output(t_out + "/split.tsv");
      manifest->output(t_out);
      manifest->extra()["checkpoint_digest"] = digest(t_out + "/header.json");
      char* loss = nullptr;
      check(dge_model_loss_csv(model.get(), &loss));
      const auto csv = take(loss);
      const auto last = csv.substr(csv.rfind(',', csv.size() - 2) + 1);
      std::cout << "trained " << config.at("model").get<std::string>() << ", final loss " << last;
    } else if (*evaluate) {
      manifest = std::make_unique<Manifest>("evaluate", manifest_path(manifest_arg, e_out, true));
      manifest->argv(argc, argv);
      if (!e_out.empty()) fs::create_directories(e_out);
      const auto ckpt = resolve_input(e_ckpt);
      const auto kg_path = resolve_input(e_kg);
      const auto split_path = e_split.empty() ? ckpt + "/split.tsv" : resolve_input(e_split);
      manifest->input("checkpoint", ckpt);
      manifest->input("kg", kg_path);
      manifest->input("split", split_path);
      manifest->config(json{{"k", e_ks}, {"exclude_train", !e_include_train}});
      manifest->begin();
      dge_model* m = nullptr;
      check(dge_model_load(ckpt.c_str(), &m));
      ModelPtr model(m);
      auto kg = load_kg(kg_path);
      auto split = load_or_make_split(kg.get(), split_path, 0.8, 0);
      auto report = run_eval(model.get(), split.get(), e_ks, e_include_train);
      char* text = nullptr;
      check(dge_report_text(report.get(), &text));
      std::cout << take(text);
      if (!e_out.empty()) write_report(report.get(), kg.get(), e_out, *manifest);
    } else if (*predict) {
      dge_model* m = nullptr;
      check(dge_model_load(resolve_input(p_ckpt).c_str(), &m));
      ModelPtr model(m);
      json all = json::object();
      for (const auto& name : p_objects) {
        char* out = nullptr;
        check(dge_model_predict(model.get(), name.c_str(), p_k, p_include_train ? 1 : 0, &out));
        all[name] = json::parse(take(out));
      }
      if (p_json) {
        std::cout << all.dump(2) << "\n";
      } else {
        for (const auto& [name, tags] : all.items()) {
          std::cout << name << "\n";
          std::size_t rank = 0;
          for (const auto& t : tags) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6f", t.at("score").get<double>());
            std::cout << "  " << ++rank << ". " << t.at("tag").get<std::string>() << "  " << buf
                      << "\n";
          }
        }
      }
    } else if (*exporter) {
      fs::create_directories(x_out);
      manifest = std::make_unique<Manifest>("export-embeddings",
                                            manifest_path(manifest_arg, x_out, true));
      manifest->argv(argc, argv);
      const auto ckpt = resolve_input(x_ckpt);
      manifest->input("checkpoint", ckpt);
      manifest->begin();
      dge_model* m = nullptr;
      check(dge_model_load(ckpt.c_str(), &m));
      ModelPtr model(m);
      if (x_format != "bin") {
        check(dge_model_export_tsv(model.get(), (x_out + "/Z_O.tsv").c_str(),
                                   (x_out + "/Z_T.tsv").c_str()));
        manifest->output(x_out + "/Z_O.tsv");
        manifest->output(x_out + "/Z_T.tsv");
      }
      if (x_format != "tsv") {
        check(dge_model_export_bin(model.get(), (x_out + "/Z_O.bin").c_str(),
                                   (x_out + "/Z_T.bin").c_str()));
        manifest->output(x_out + "/Z_O.bin");
        manifest->output(x_out + "/Z_T.bin");
      }
    } else if (*sweep || *ablate) {
      const bool is_sweep = static_cast<bool>(*sweep);
      const auto& out_dir = is_sweep ? s_out : a_out;
      const auto& flags = is_sweep ? s_flags : a_flags;
      fs::create_directories(out_dir);
      manifest = std::make_unique<Manifest>(is_sweep ? "sweep" : "ablate",
                                            manifest_path(manifest_arg, out_dir, true));
      manifest->argv(argc, argv);
      const auto base = flags.overlay();
      const auto config = resolve(base);
      const auto seed = config.at("seed").get<std::uint64_t>();
      manifest->config(config);
      manifest->seed("root", seed);
      const auto kg_path = resolve_input(is_sweep ? s_kg : a_kg);
      const auto split_arg = is_sweep ? s_split : a_split;
      manifest->input("kg", kg_path);
      if (!split_arg.empty()) manifest->input("split", resolve_input(split_arg));
      if (!flags.config_path.empty()) manifest->input("config", resolve_input(flags.config_path));
      manifest->begin();

      auto kg = load_kg(kg_path);
      auto split = load_or_make_split(kg.get(), resolve_input(split_arg),
                                      is_sweep ? s_ratio : a_ratio, seed);
      check(dge_split_save(split.get(), kg.get(), (out_dir + "/split.tsv").c_str()));
      manifest->output(out_dir + "/split.tsv");

      std::vector<std::pair<std::string, json>> runs;
      std::vector<std::pair<std::string, SplitPtr>> splits;
      if (is_sweep) {
        manifest->extra()["levels"] = s_levels;
        for (double level : s_levels) {
          dge_split* sub = nullptr;
          check(dge_split_subsample(split.get(), level, seed, &sub));
          char label[32];
          std::snprintf(label, sizeof(label), "level_%g", level);
          splits.emplace_back(label, SplitPtr(sub));
          runs.emplace_back(label, config);
        }
      } else {
        for (const auto& name : split_csv_list(a_models)) {
          json overlay = base;
          overlay["model"] = name;
          runs.emplace_back(name, resolve(overlay));
        }
        manifest->extra()["models"] = split_csv_list(a_models);
      }

      std::ostringstream summary;
      summary << (is_sweep ? "level" : "model") << ",train_pairs,recall@3,ndcg@3,recall@5,ndcg@5\n";
      for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& [label, cfg] = runs[i];
        const dge_split* used = is_sweep ? splits[i].second.get() : split.get();
        const auto run_dir = out_dir + "/" + label;
        std::fprintf(stderr, "[%s] training %s\n", label.c_str(),
                     cfg.at("model").get<std::string>().c_str());
        auto model = run_training(kg.get(), used, cfg, "", {true, 0, 0});
        check(dge_model_save(model.get(), run_dir.c_str()));
        manifest->output(run_dir);
        auto report = run_eval(model.get(), used, {3, 5}, false);
        write_report(report.get(), kg.get(), run_dir, *manifest);
        double r3 = 0;
        double n3 = 0;
        double r5 = 0;
        double n5 = 0;
        check(dge_report_metric(report.get(), 3, &r3, &n3));
        check(dge_report_metric(report.get(), 5, &r5, &n5));
        std::size_t n_train = 0;
        check(dge_split_sizes(used, &n_train, nullptr));
        char line[160];
        std::snprintf(line, sizeof(line), "%s,%zu,%.6f,%.6f,%.6f,%.6f\n", label.c_str(), n_train,
                      r3, n3, r5, n5);
        summary << line;
        std::cout << line << std::flush;
      }
      write_text(out_dir + "/summary.csv", summary.str());
      manifest->output(out_dir + "/summary.csv");
    }
    if (manifest) manifest->finish(kExitOk);
    return kExitOk;
  } catch (const Failure& f) {
    const int code = exit_code(f.status);
    std::cerr << "error: " << f.message << "\n";
    if (manifest) {
      try {
        manifest->finish(code, f.message);
      } catch (...) {
      }
    }
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (manifest) {
      try {
        manifest->finish(kExitData, e.what());
      } catch (...) {
      }
    }
    return kExitData;
  }
}
