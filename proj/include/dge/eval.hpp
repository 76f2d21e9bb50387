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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dge/kg.hpp"
#include "dge/linalg.hpp"

namespace dge {

struct Split {
  std::vector<IdPair> train;
  std::vector<IdPair> test;
  double ratio = 0.8;
  std::uint64_t seed = 0;
};

/// Uniform pair-level split: round(ratio * n) pairs (clamped to [1, n-1])
/// go to training. Both halves keep the input order.
Split split_pairs(std::span<const IdPair> pairs, double ratio, std::uint64_t seed);

// Split file: one `train|test <TAB> object <TAB> tag` line per pair, by name.
void save_split(const std::string& path, const Split& split, const KnowledgeGraph& kg);
Split load_split(const std::string& path, const KnowledgeGraph& kg);

/// All tags minus `exclude` (sorted), by descending score, ties by tag id.
std::vector<EntityId> rank_tags(const DenseMatrix& z_object, const DenseMatrix& z_tag,
                                std::size_t object, std::span<const EntityId> exclude);

/// |top-k ∩ truth| / |truth|. `truth` must be nonempty.
double recall_at_k(std::span<const EntityId> ranked, std::span<const EntityId> truth, std::size_t k);
/// Binary-gain NDCG with IDCG over min(k, |truth|) ideal hits.
double ndcg_at_k(std::span<const EntityId> ranked, std::span<const EntityId> truth, std::size_t k);

struct EvalOptions {
  std::vector<std::size_t> ks = {3, 5};
  bool exclude_train = true;
  bool per_object = false;  // keep per-object rows in the report
};

struct ObjectMetrics {
  EntityId object = 0;
  std::size_t train_tags = 0;
  std::size_t test_tags = 0;
  std::vector<double> recall;  // one per k
  std::vector<double> ndcg;
};

struct BucketMetrics {
  std::string label;
  std::size_t lo = 0;  // training-tag count range [lo, hi)
  std::size_t hi = 0;
  std::size_t objects = 0;
  std::vector<double> recall;
  std::vector<double> ndcg;
};

struct EvalReport {
  std::vector<std::size_t> ks;
  std::vector<double> recall;
  std::vector<double> ndcg;
  std::size_t evaluated_objects = 0;
  bool exclude_train = true;
  std::vector<BucketMetrics> buckets;
  std::vector<ObjectMetrics> objects;
};

/// Bucket edges on the training-tag count: {0}, (0,10), [10,20), [20,30),
/// [30,40), [40,inf).
std::vector<BucketMetrics> default_buckets();

/// Macro-averages metrics over objects with at least one test tag.
EvalReport evaluate(const DenseMatrix& z_object, const DenseMatrix& z_tag, const Split& split,
                    const EvalOptions& options = {});

nlohmann::ordered_json report_json(const EvalReport& r);
std::string report_text(const EvalReport& r);
/// Per-object rows (requires options.per_object).
void write_report_csv(std::ostream& out, const EvalReport& r, const KnowledgeGraph* kg = nullptr);

// ---------------------------------------------------------------------------
// Planted-structure synthetic data
// ---------------------------------------------------------------------------

/// Each cluster owns disjoint blocks of objects, tags and users, dealt
/// round-robin into `profiles_per_cluster` profiles. Users interact with the
/// objects of their profile and objects carry the tags of their profile,
/// each link present with probability `intra_prob`. Cross-cluster
/// interactions and tag observations are added with `noise_prob`. The test
/// half holds only within-profile links, so a held-out tag is recoverable
/// from the object's co-users and the tag's co-occurring tags.
struct SyntheticSpec {
  std::size_t clusters = 4;
  std::size_t objects_per_cluster = 20;
  std::size_t tags_per_cluster = 10;
  std::size_t users_per_cluster = 15;
  std::size_t profiles_per_cluster = 4;
  double intra_prob = 1.0;
  double noise_prob = 0.01;
  double holdout_ratio = 0.2;  // fraction of intra-cluster links held out
  std::uint64_t seed = 0;
};

struct SyntheticData {
  KnowledgeGraph kg;  // every link, held-out ones included
  Split split;        // test holds only intra-cluster links
  std::vector<std::uint32_t> object_cluster;
  std::vector<std::uint32_t> tag_cluster;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);

}  // namespace dge
