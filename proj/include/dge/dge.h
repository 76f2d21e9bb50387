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

#ifndef DGE_DGE_H_
#define DGE_DGE_H_

/* C interface of the dual-graph embedding library. Every function returns a
 * dge_status; on failure dge_last_error() describes the cause for the
 * calling thread. Strings returned through char** are owned by the caller
 * and released with dge_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(DGE_BUILDING_LIBRARY)
#define DGE_API __declspec(dllexport)
#else
#define DGE_API __declspec(dllimport)
#endif
#else
#define DGE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dge_status {
  DGE_OK = 0,
  DGE_ERR_INVALID_ARGUMENT = 1,
  DGE_ERR_IO = 2,
  DGE_ERR_PARSE = 3,
  DGE_ERR_DATA = 4,
  DGE_ERR_NUMERIC = 5,
  DGE_ERR_STATE = 6,
  DGE_ERR_INTERNAL = 7
} dge_status;

typedef struct dge_kg dge_kg;
typedef struct dge_split dge_split;
typedef struct dge_graphs dge_graphs;
typedef struct dge_model dge_model;
typedef struct dge_report dge_report;

typedef struct dge_kg_stats {
  size_t users;
  size_t objects;
  size_t tags;
  size_t interact_edges;
  size_t tagged_edges;
  size_t duplicates;
} dge_kg_stats;

/* Called once per finished epoch. */
typedef void (*dge_epoch_fn)(size_t epoch, double mean_loss, void* user);

DGE_API const char* dge_version(void);
DGE_API const char* dge_last_error(void);
DGE_API const char* dge_status_name(dge_status s);
DGE_API void dge_string_free(char* s);

/* Knowledge graph */
DGE_API dge_status dge_kg_load(const char* path, dge_kg** out);
DGE_API dge_status dge_kg_convert(const char* dataset, const char* raw_dir, dge_kg** out);
/* spec_json: synthetic generator overrides ("" or NULL for defaults). The
 * planted split is returned through split_out when non-NULL. */
DGE_API dge_status dge_kg_synthetic(const char* spec_json, dge_kg** out, dge_split** split_out);
DGE_API dge_status dge_kg_save(const dge_kg* kg, const char* path);
DGE_API dge_status dge_kg_stats_get(const dge_kg* kg, dge_kg_stats* out);
DGE_API dge_status dge_kg_stats_json(const dge_kg* kg, char** json_out);
DGE_API void dge_kg_free(dge_kg* kg);

/* Train/test split of the object-tag pairs */
DGE_API dge_status dge_split_make(const dge_kg* kg, double ratio, uint64_t seed, dge_split** out);
/* Keeps round(fraction * |train|) training pairs, drawn with seed. */
DGE_API dge_status dge_split_subsample(const dge_split* split, double fraction, uint64_t seed,
                                       dge_split** out);
DGE_API dge_status dge_split_save(const dge_split* split, const dge_kg* kg, const char* path);
DGE_API dge_status dge_split_load(const dge_kg* kg, const char* path, dge_split** out);
DGE_API dge_status dge_split_sizes(const dge_split* split, size_t* train, size_t* test);
DGE_API void dge_split_free(dge_split* split);

/* Dual graphs; the tag graph uses the split's training pairs (all tagged
 * pairs when split is NULL). */
DGE_API dge_status dge_graphs_build(const dge_kg* kg, const dge_split* split, double k_object,
                                    double k_tag, dge_graphs** out);
DGE_API dge_status dge_graphs_save(const dge_graphs* g, const char* dir);
DGE_API dge_status dge_graphs_nnz(const dge_graphs* g, size_t* object_nnz, size_t* tag_nnz);
DGE_API void dge_graphs_free(dge_graphs* g);

/* Training. config_json overlays the defaults and may name a "profile".
 * When checkpoint_dir is set, periodic snapshots go to
 * checkpoint_dir/epoch_<n> and a numerical failure leaves the last model
 * state in checkpoint_dir/failed. on_epoch may be NULL. */
DGE_API dge_status dge_config_resolve(const char* config_json, char** resolved_json);
DGE_API dge_status dge_train(const dge_kg* kg, const dge_split* split, const char* config_json,
                             const char* checkpoint_dir, dge_epoch_fn on_epoch, void* user,
                             dge_model** out);
DGE_API dge_status dge_model_save(const dge_model* m, const char* dir);
DGE_API dge_status dge_model_load(const char* dir, dge_model** out);
DGE_API dge_status dge_model_config_json(const dge_model* m, char** json_out);
DGE_API dge_status dge_model_loss_csv(const dge_model* m, char** csv_out);
DGE_API dge_status dge_model_dims(const dge_model* m, size_t* num_objects, size_t* num_tags,
                                  size_t* dim);
/* Copies embedding rows into a caller buffer of rows*dim doubles. */
DGE_API dge_status dge_model_embeddings(const dge_model* m, int tag_side, double* buf,
                                        size_t buf_len);
DGE_API dge_status dge_model_export_tsv(const dge_model* m, const char* object_path,
                                        const char* tag_path);
DGE_API dge_status dge_model_export_bin(const dge_model* m, const char* object_path,
                                        const char* tag_path);
/* Top-k tags for an object name as JSON [{"tag":..,"score":..}, ...].
 * Tags seen with the object during training are skipped unless
 * include_train is nonzero. */
DGE_API dge_status dge_model_predict(const dge_model* m, const char* object, size_t k,
                                     int include_train, char** json_out);
DGE_API void dge_model_free(dge_model* m);

/* Evaluation. ks may be NULL for the default {3, 5}. */
DGE_API dge_status dge_evaluate(const dge_model* m, const dge_split* split, const size_t* ks,
                                size_t num_ks, int exclude_train, dge_report** out);
DGE_API dge_status dge_report_json(const dge_report* r, char** json_out);
DGE_API dge_status dge_report_text(const dge_report* r, char** text_out);
DGE_API dge_status dge_report_csv(const dge_report* r, const dge_kg* kg, char** csv_out);
DGE_API dge_status dge_report_metric(const dge_report* r, size_t k, double* recall,
                                     double* ndcg);
DGE_API void dge_report_free(dge_report* r);

#ifdef __cplusplus
}
#endif

#endif /* DGE_DGE_H_ */
