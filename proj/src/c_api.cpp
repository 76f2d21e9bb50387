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

#include "dge/dge.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "dge/checkpoint.hpp"
#include "dge/convert.hpp"
#include "dge/error.hpp"
#include "dge/eval.hpp"
#include "dge/trainer.hpp"

struct dge_kg {
  dge::KnowledgeGraph kg;
};

struct dge_split {
  dge::Split split;
};

struct dge_graphs {
  dge::DualGraphs graphs;
};

struct dge_model {
  dge::Checkpoint ckpt;
};

struct dge_report {
  dge::EvalReport report;
};

namespace {

thread_local std::string g_last_error;

dge_status to_status(dge::ErrorKind k) {
  switch (k) {
    case dge::ErrorKind::kInvalidArgument: return DGE_ERR_INVALID_ARGUMENT;
    case dge::ErrorKind::kIo: return DGE_ERR_IO;
    case dge::ErrorKind::kParse: return DGE_ERR_PARSE;
    case dge::ErrorKind::kData: return DGE_ERR_DATA;
    case dge::ErrorKind::kNumeric: return DGE_ERR_NUMERIC;
    case dge::ErrorKind::kState: return DGE_ERR_STATE;
  }
  return DGE_ERR_INTERNAL;
}

template <typename Fn>
dge_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DGE_OK;
  } catch (const dge::Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("json: ") + e.what();
    return DGE_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DGE_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DGE_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return DGE_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  dge::require(p != nullptr, dge::ErrorKind::kInvalidArgument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

nlohmann::json parse_json(const char* text) {
  if (text == nullptr || *text == '\0') return nlohmann::json::object();
  return nlohmann::json::parse(text);
}

dge::TrainConfig resolve_config(const char* config_json) {
  auto cfg = dge::config_from_json(parse_json(config_json));
  cfg.validate();
  return cfg;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  dge::require(static_cast<bool>(out), dge::ErrorKind::kIo, "cannot open for writing: " + path);
  out << contents;
  dge::require(static_cast<bool>(out), dge::ErrorKind::kIo, "write failed: " + path);
}

}  // namespace

extern "C" {

const char* dge_version(void) { return "0.1.0"; }

const char* dge_last_error(void) { return g_last_error.c_str(); }

const char* dge_status_name(dge_status s) {
  switch (s) {
    case DGE_OK: return "ok";
    case DGE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DGE_ERR_IO: return "io error";
    case DGE_ERR_PARSE: return "parse error";
    case DGE_ERR_DATA: return "data error";
    case DGE_ERR_NUMERIC: return "numerical failure";
    case DGE_ERR_STATE: return "state error";
    case DGE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void dge_string_free(char* s) { std::free(s); }

dge_status dge_kg_load(const char* path, dge_kg** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new dge_kg{dge::load_triples(path)};
  });
}

dge_status dge_kg_convert(const char* dataset, const char* raw_dir, dge_kg** out) {
  return guarded([&] {
    need(dataset, "dataset");
    need(raw_dir, "raw_dir");
    need(out, "out");
    *out = new dge_kg{dge::convert_dataset(dataset, raw_dir)};
  });
}

dge_status dge_kg_synthetic(const char* spec_json, dge_kg** out, dge_split** split_out) {
  return guarded([&] {
    need(out, "out");
    auto data = dge::generate_synthetic(dge::synthetic_spec_from_json(parse_json(spec_json)));
    auto* kg = new dge_kg{std::move(data.kg)};
    if (split_out != nullptr) {
      try {
        *split_out = new dge_split{std::move(data.split)};
      } catch (...) {
        delete kg;
        throw;
      }
    }
    *out = kg;
  });
}

dge_status dge_kg_save(const dge_kg* kg, const char* path) {
  return guarded([&] {
    need(kg, "kg");
    need(path, "path");
    kg->kg.save(path);
  });
}

dge_status dge_kg_stats_get(const dge_kg* kg, dge_kg_stats* out) {
  return guarded([&] {
    need(kg, "kg");
    need(out, "out");
    const auto s = dge::compute_stats(kg->kg);
    *out = dge_kg_stats{s.users, s.objects, s.tags, s.interact_edges, s.tagged_edges, s.duplicates};
  });
}

dge_status dge_kg_stats_json(const dge_kg* kg, char** json_out) {
  return guarded([&] {
    need(kg, "kg");
    need(json_out, "json_out");
    const auto s = dge::compute_stats(kg->kg);
    nlohmann::ordered_json j;
    j["users"] = s.users;
    j["objects"] = s.objects;
    j["tags"] = s.tags;
    j["interact_edges"] = s.interact_edges;
    j["tagged_edges"] = s.tagged_edges;
    j["interact_density"] = s.interact_density;
    j["tagged_density"] = s.tagged_density;
    j["duplicates"] = s.duplicates;
    *json_out = dup_string(j.dump(2) + "\n");
  });
}

void dge_kg_free(dge_kg* kg) { delete kg; }

dge_status dge_split_make(const dge_kg* kg, double ratio, uint64_t seed, dge_split** out) {
  return guarded([&] {
    need(kg, "kg");
    need(out, "out");
    *out = new dge_split{dge::split_pairs(kg->kg.tagged_pairs(), ratio, seed)};
  });
}

dge_status dge_split_subsample(const dge_split* split, double fraction, uint64_t seed,
                               dge_split** out) {
  return guarded([&] {
    need(split, "split");
    need(out, "out");
    dge::require(fraction > 0.0 && fraction <= 1.0, dge::ErrorKind::kInvalidArgument,
                 "subsample fraction must lie in (0, 1]");
    dge::Split s = split->split;
    if (fraction < 1.0 && s.train.size() > 1) {
      s.train = dge::split_pairs(s.train, fraction, seed).train;
    }
    *out = new dge_split{std::move(s)};
  });
}

dge_status dge_split_save(const dge_split* split, const dge_kg* kg, const char* path) {
  return guarded([&] {
    need(split, "split");
    need(kg, "kg");
    need(path, "path");
    dge::save_split(path, split->split, kg->kg);
  });
}

dge_status dge_split_load(const dge_kg* kg, const char* path, dge_split** out) {
  return guarded([&] {
    need(kg, "kg");
    need(path, "path");
    need(out, "out");
    *out = new dge_split{dge::load_split(path, kg->kg)};
  });
}

dge_status dge_split_sizes(const dge_split* split, size_t* train, size_t* test) {
  return guarded([&] {
    need(split, "split");
    if (train != nullptr) *train = split->split.train.size();
    if (test != nullptr) *test = split->split.test.size();
  });
}

void dge_split_free(dge_split* split) { delete split; }

dge_status dge_graphs_build(const dge_kg* kg, const dge_split* split, double k_object,
                            double k_tag, dge_graphs** out) {
  return guarded([&] {
    need(kg, "kg");
    need(out, "out");
    const auto& pairs = split != nullptr ? split->split.train : kg->kg.tagged_pairs();
    *out = new dge_graphs{dge::build_dual_graphs(kg->kg, pairs, k_object, k_tag)};
  });
}

dge_status dge_graphs_save(const dge_graphs* g, const char* dir) {
  return guarded([&] {
    need(g, "graphs");
    need(dir, "dir");
    dge::save_graph(dir, g->graphs.object);
    dge::save_graph(dir, g->graphs.tag);
  });
}

dge_status dge_graphs_nnz(const dge_graphs* g, size_t* object_nnz, size_t* tag_nnz) {
  return guarded([&] {
    need(g, "graphs");
    if (object_nnz != nullptr) *object_nnz = g->graphs.object.weights.nnz();
    if (tag_nnz != nullptr) *tag_nnz = g->graphs.tag.weights.nnz();
  });
}

void dge_graphs_free(dge_graphs* g) { delete g; }

dge_status dge_config_resolve(const char* config_json, char** resolved_json) {
  return guarded([&] {
    need(resolved_json, "resolved_json");
    *resolved_json = dup_string(dge::to_json(resolve_config(config_json)).dump(2) + "\n");
  });
}

dge_status dge_train(const dge_kg* kg, const dge_split* split, const char* config_json,
                     const char* checkpoint_dir, dge_epoch_fn on_epoch, void* user,
                     dge_model** out) {
  return guarded([&] {
    need(kg, "kg");
    need(out, "out");
    const auto cfg = resolve_config(config_json);
    const auto& pairs = split != nullptr ? split->split.train : kg->kg.tagged_pairs();
    const std::string ckpt_dir = checkpoint_dir != nullptr ? checkpoint_dir : "";

    auto snapshot = [&](const dge::TrainedModel& m, const std::string& dir) {
      dge::save_checkpoint(dir, dge::Checkpoint{m, kg->kg.objects().names(), kg->kg.tags().names()});
    };
    dge::TrainHooks hooks;
    if (on_epoch != nullptr) {
      hooks.on_epoch = [&](std::size_t epoch, double loss) { on_epoch(epoch, loss, user); };
    }
    if (!ckpt_dir.empty()) {
      hooks.on_checkpoint = [&](const dge::TrainedModel& m) {
        snapshot(m, ckpt_dir + "/epoch_" + std::to_string(m.epochs_completed));
      };
      hooks.on_failure = [&](const dge::TrainedModel& m) { snapshot(m, ckpt_dir + "/failed"); };
    }
    auto model = dge::train(kg->kg, pairs, cfg, hooks);
    *out = new dge_model{
        dge::Checkpoint{std::move(model), kg->kg.objects().names(), kg->kg.tags().names()}};
  });
}

dge_status dge_model_save(const dge_model* m, const char* dir) {
  return guarded([&] {
    need(m, "model");
    need(dir, "dir");
    dge::save_checkpoint(dir, m->ckpt);
  });
}

dge_status dge_model_load(const char* dir, dge_model** out) {
  return guarded([&] {
    need(dir, "dir");
    need(out, "out");
    *out = new dge_model{dge::load_checkpoint(dir)};
  });
}

dge_status dge_model_config_json(const dge_model* m, char** json_out) {
  return guarded([&] {
    need(m, "model");
    need(json_out, "json_out");
    *json_out = dup_string(dge::to_json(m->ckpt.model.config).dump(2) + "\n");
  });
}

dge_status dge_model_loss_csv(const dge_model* m, char** csv_out) {
  return guarded([&] {
    need(m, "model");
    need(csv_out, "csv_out");
    std::ostringstream ss;
    dge::write_loss_csv(ss, m->ckpt.model.loss_trace);
    *csv_out = dup_string(ss.str());
  });
}

dge_status dge_model_dims(const dge_model* m, size_t* num_objects, size_t* num_tags,
                          size_t* dim) {
  return guarded([&] {
    need(m, "model");
    if (num_objects != nullptr) *num_objects = m->ckpt.model.z_object.rows();
    if (num_tags != nullptr) *num_tags = m->ckpt.model.z_tag.rows();
    if (dim != nullptr) *dim = m->ckpt.model.z_object.cols();
  });
}

dge_status dge_model_embeddings(const dge_model* m, int tag_side, double* buf, size_t buf_len) {
  return guarded([&] {
    need(m, "model");
    need(buf, "buf");
    const auto& z = tag_side ? m->ckpt.model.z_tag : m->ckpt.model.z_object;
    dge::require(buf_len >= z.rows() * z.cols(), dge::ErrorKind::kInvalidArgument,
                 "embedding buffer too small");
    std::memcpy(buf, z.values().data(), z.size() * sizeof(double));
  });
}

dge_status dge_model_export_tsv(const dge_model* m, const char* object_path,
                                const char* tag_path) {
  return guarded([&] {
    need(m, "model");
    need(object_path, "object_path");
    need(tag_path, "tag_path");
    std::ostringstream zo;
    dge::write_embeddings_tsv(zo, m->ckpt.model.z_object, m->ckpt.object_names);
    write_file(object_path, zo.str());
    std::ostringstream zt;
    dge::write_embeddings_tsv(zt, m->ckpt.model.z_tag, m->ckpt.tag_names);
    write_file(tag_path, zt.str());
  });
}

dge_status dge_model_export_bin(const dge_model* m, const char* object_path,
                                const char* tag_path) {
  return guarded([&] {
    need(m, "model");
    need(object_path, "object_path");
    need(tag_path, "tag_path");
    dge::save_matrix(object_path, m->ckpt.model.z_object);
    dge::save_matrix(tag_path, m->ckpt.model.z_tag);
  });
}

dge_status dge_model_predict(const dge_model* m, const char* object, size_t k,
                             int include_train, char** json_out) {
  return guarded([&] {
    need(m, "model");
    need(object, "object");
    need(json_out, "json_out");
    const auto& names = m->ckpt.object_names;
    const auto it = std::find(names.begin(), names.end(), std::string(object));
    dge::require(it != names.end(), dge::ErrorKind::kData,
                 "unknown object '" + std::string(object) + "'");
    const auto o = static_cast<dge::EntityId>(it - names.begin());
    std::vector<dge::EntityId> exclude;
    if (!include_train) {
      for (const auto& [po, pt] : m->ckpt.model.train_pairs) {
        if (po == o) exclude.push_back(pt);
      }
      std::sort(exclude.begin(), exclude.end());
      exclude.erase(std::unique(exclude.begin(), exclude.end()), exclude.end());
    }
    const auto& zo = m->ckpt.model.z_object;
    const auto& zt = m->ckpt.model.z_tag;
    const auto ranked = dge::rank_tags(zo, zt, o, exclude);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
      nlohmann::ordered_json e;
      e["tag"] = m->ckpt.tag_names[ranked[i]];
      e["score"] = dge::dot(zo.row(o), zt.row(ranked[i]));
      arr.push_back(std::move(e));
    }
    *json_out = dup_string(arr.dump(2) + "\n");
  });
}

void dge_model_free(dge_model* m) { delete m; }

dge_status dge_evaluate(const dge_model* m, const dge_split* split, const size_t* ks,
                        size_t num_ks, int exclude_train, dge_report** out) {
  return guarded([&] {
    need(m, "model");
    need(split, "split");
    need(out, "out");
    dge::EvalOptions opt;
    if (ks != nullptr) opt.ks.assign(ks, ks + num_ks);
    opt.exclude_train = exclude_train != 0;
    opt.per_object = true;
    *out = new dge_report{dge::evaluate(m->ckpt.model.z_object, m->ckpt.model.z_tag, split->split, opt)};
  });
}

dge_status dge_report_json(const dge_report* r, char** json_out) {
  return guarded([&] {
    need(r, "report");
    need(json_out, "json_out");
    *json_out = dup_string(dge::report_json(r->report).dump(2) + "\n");
  });
}

dge_status dge_report_text(const dge_report* r, char** text_out) {
  return guarded([&] {
    need(r, "report");
    need(text_out, "text_out");
    *text_out = dup_string(dge::report_text(r->report));
  });
}

dge_status dge_report_csv(const dge_report* r, const dge_kg* kg, char** csv_out) {
  return guarded([&] {
    need(r, "report");
    need(csv_out, "csv_out");
    std::ostringstream ss;
    dge::write_report_csv(ss, r->report, kg != nullptr ? &kg->kg : nullptr);
    *csv_out = dup_string(ss.str());
  });
}

dge_status dge_report_metric(const dge_report* r, size_t k, double* recall, double* ndcg) {
  return guarded([&] {
    need(r, "report");
    const auto& ks = r->report.ks;
    const auto it = std::find(ks.begin(), ks.end(), k);
    dge::require(it != ks.end(), dge::ErrorKind::kInvalidArgument,
                 "k=" + std::to_string(k) + " was not evaluated");
    const auto i = static_cast<std::size_t>(it - ks.begin());
    if (recall != nullptr) *recall = r->report.recall[i];
    if (ndcg != nullptr) *ndcg = r->report.ndcg[i];
  });
}

void dge_report_free(dge_report* r) { delete r; }

}  // extern "C"
