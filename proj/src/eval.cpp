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

#include "dge/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "dge/error.hpp"
#include "dge/rng.hpp"

namespace dge {

Split split_pairs(std::span<const IdPair> pairs, double ratio, std::uint64_t seed) {
  require(ratio > 0.0 && ratio < 1.0, ErrorKind::kInvalidArgument, "split: ratio must be in (0,1)");
  require(pairs.size() >= 2, ErrorKind::kData, "split: need at least 2 pairs");
  const std::size_t n = pairs.size();
  auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = make_rng(seed, "split");
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<char> in_train(n, 0);
  for (std::size_t i = 0; i < n_train; ++i) in_train[perm[i]] = 1;

  Split s;
  s.ratio = ratio;
  s.seed = seed;
  for (std::size_t i = 0; i < n; ++i) (in_train[i] ? s.train : s.test).push_back(pairs[i]);
  return s;
}

void save_split(const std::string& path, const Split& split, const KnowledgeGraph& kg) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot open for writing: " + path);
  out << "# ratio=" << split.ratio << " seed=" << split.seed << '\n';
  for (const auto& [o, t] : split.train) {
    out << "train\t" << kg.objects().name(o) << '\t' << kg.tags().name(t) << '\n';
  }
  for (const auto& [o, t] : split.test) {
    out << "test\t" << kg.objects().name(o) << '\t' << kg.tags().name(t) << '\n';
  }
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed: " + path);
}

Split load_split(const std::string& path, const KnowledgeGraph& kg) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open: " + path);
  Split s;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# ratio=", 0) == 0) {
      std::sscanf(line.c_str(), "# ratio=%lf seed=%lu", &s.ratio, &s.seed);
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    const auto a = line.find('\t');
    const auto b = a == std::string::npos ? a : line.find('\t', a + 1);
    const std::string where = path + ":" + std::to_string(line_no);
    require(b != std::string::npos, ErrorKind::kParse, where + ": expected 'part<TAB>object<TAB>tag'");
    const std::string part = line.substr(0, a);
    const auto o = kg.objects().find(line.substr(a + 1, b - a - 1));
    const auto t = kg.tags().find(line.substr(b + 1));
    require(o >= 0 && t >= 0, ErrorKind::kData, where + ": unknown object or tag");
    const IdPair p{static_cast<EntityId>(o), static_cast<EntityId>(t)};
    if (part == "train") s.train.push_back(p);
    else if (part == "test") s.test.push_back(p);
    else fail(ErrorKind::kParse, where + ": part must be 'train' or 'test'");
  }
  return s;
}

std::vector<EntityId> rank_tags(const DenseMatrix& z_object, const DenseMatrix& z_tag,
                                std::size_t object, std::span<const EntityId> exclude) {
  require(object < z_object.rows(), ErrorKind::kInvalidArgument, "rank_tags: unknown object");
  const std::size_t m = z_tag.rows();
  std::vector<double> scores(m);
  for (std::size_t t = 0; t < m; ++t) scores[t] = dot(z_tag.row(t), z_object.row(object));
  std::vector<EntityId> ranked;
  ranked.reserve(m);
  for (std::size_t t = 0; t < m; ++t) {
    if (!std::binary_search(exclude.begin(), exclude.end(), static_cast<EntityId>(t))) {
      ranked.push_back(static_cast<EntityId>(t));
    }
  }
  std::sort(ranked.begin(), ranked.end(), [&](EntityId a, EntityId b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
  });
  return ranked;
}

namespace {

bool contains(std::span<const EntityId> truth, EntityId t) {
  return std::find(truth.begin(), truth.end(), t) != truth.end();
}

}  // namespace

double recall_at_k(std::span<const EntityId> ranked, std::span<const EntityId> truth, std::size_t k) {
  require(!truth.empty(), ErrorKind::kInvalidArgument, "recall_at_k: empty truth");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) hits += contains(truth, ranked[i]);
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double ndcg_at_k(std::span<const EntityId> ranked, std::span<const EntityId> truth, std::size_t k) {
  require(!truth.empty(), ErrorKind::kInvalidArgument, "ndcg_at_k: empty truth");
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    if (contains(truth, ranked[i])) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, truth.size()); ++i) {
    idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg / idcg;
}

std::vector<BucketMetrics> default_buckets() {
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  return {
      {"0", 0, 1, 0, {}, {}},        {"(0,10)", 1, 10, 0, {}, {}},  {"[10,20)", 10, 20, 0, {}, {}},
      {"[20,30)", 20, 30, 0, {}, {}}, {"[30,40)", 30, 40, 0, {}, {}}, {"[40,inf)", 40, kInf, 0, {}, {}},
  };
}

EvalReport evaluate(const DenseMatrix& z_object, const DenseMatrix& z_tag, const Split& split,
                    const EvalOptions& options) {
  require(!split.test.empty(), ErrorKind::kData, "evaluate: empty test set");
  require(!options.ks.empty(), ErrorKind::kInvalidArgument, "evaluate: no cutoffs given");
  require(z_object.cols() == z_tag.cols(), ErrorKind::kInvalidArgument,
          "evaluate: embedding dimensions differ");
  const std::size_t n = z_object.rows();
  for (const auto* part : {&split.train, &split.test}) {
    for (const auto& [o, t] : *part) {
      require(o < n && t < z_tag.rows(), ErrorKind::kInvalidArgument, "evaluate: pair id out of range");
    }
  }
  const auto train_sets = tag_sets(n, split.train);
  const auto test_sets = tag_sets(n, split.test);
  const std::size_t nk = options.ks.size();

  EvalReport r;
  r.ks = options.ks;
  r.exclude_train = options.exclude_train;
  r.recall.assign(nk, 0.0);
  r.ndcg.assign(nk, 0.0);
  r.buckets = default_buckets();
  for (auto& b : r.buckets) {
    b.recall.assign(nk, 0.0);
    b.ndcg.assign(nk, 0.0);
  }

  const std::vector<EntityId> none;
  for (std::size_t o = 0; o < n; ++o) {
    const auto& truth = test_sets[o];
    if (truth.empty()) continue;
    const auto& excl = options.exclude_train ? train_sets[o] : none;
    const auto ranked = rank_tags(z_object, z_tag, o, excl);
    ObjectMetrics om;
    om.object = static_cast<EntityId>(o);
    om.train_tags = train_sets[o].size();
    om.test_tags = truth.size();
    for (std::size_t k : options.ks) {
      om.recall.push_back(recall_at_k(ranked, truth, k));
      om.ndcg.push_back(ndcg_at_k(ranked, truth, k));
    }
    auto bucket = std::find_if(r.buckets.begin(), r.buckets.end(), [&](const BucketMetrics& b) {
      return om.train_tags >= b.lo && om.train_tags < b.hi;
    });
    ++bucket->objects;
    for (std::size_t i = 0; i < nk; ++i) {
      r.recall[i] += om.recall[i];
      r.ndcg[i] += om.ndcg[i];
      bucket->recall[i] += om.recall[i];
      bucket->ndcg[i] += om.ndcg[i];
    }
    ++r.evaluated_objects;
    if (options.per_object) r.objects.push_back(std::move(om));
  }
  require(r.evaluated_objects > 0, ErrorKind::kData, "evaluate: no object has a test tag");
  for (std::size_t i = 0; i < nk; ++i) {
    r.recall[i] /= static_cast<double>(r.evaluated_objects);
    r.ndcg[i] /= static_cast<double>(r.evaluated_objects);
    for (auto& b : r.buckets) {
      if (b.objects == 0) continue;
      b.recall[i] /= static_cast<double>(b.objects);
      b.ndcg[i] /= static_cast<double>(b.objects);
    }
  }
  return r;
}

nlohmann::ordered_json report_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["evaluated_objects"] = r.evaluated_objects;
  nlohmann::ordered_json overall;
  for (std::size_t i = 0; i < r.ks.size(); ++i) {
    overall["recall@" + std::to_string(r.ks[i])] = r.recall[i];
    overall["ndcg@" + std::to_string(r.ks[i])] = r.ndcg[i];
  }
  j["metrics"] = overall;
  auto buckets = nlohmann::ordered_json::array();
  for (const auto& b : r.buckets) {
    nlohmann::ordered_json bj;
    bj["train_tags"] = b.label;
    bj["objects"] = b.objects;
    for (std::size_t i = 0; i < r.ks.size(); ++i) {
      bj["recall@" + std::to_string(r.ks[i])] = b.recall[i];
      bj["ndcg@" + std::to_string(r.ks[i])] = b.ndcg[i];
    }
    buckets.push_back(bj);
  }
  j["buckets"] = buckets;
  j["conventions"] = {{"recall_denominator", "|truth|"},
                      {"ndcg_gain", "binary, log2(rank+1) discount"},
                      {"averaging", "macro over objects with >=1 test tag"},
                      {"exclude_train_tags", r.exclude_train},
                      {"tie_break", "ascending tag id"}};
  return j;
}

std::string report_text(const EvalReport& r) {
  std::ostringstream os;
  char buf[128];
  os << "evaluated objects: " << r.evaluated_objects << '\n';
  std::snprintf(buf, sizeof(buf), "%-10s %8s", "bucket", "objects");
  os << buf;
  for (std::size_t k : r.ks) {
    std::snprintf(buf, sizeof(buf), " %10s %10s", ("Recall@" + std::to_string(k)).c_str(),
                  ("NDCG@" + std::to_string(k)).c_str());
    os << buf;
  }
  os << '\n';
  auto row = [&](const std::string& label, std::size_t count, const std::vector<double>& rec,
                 const std::vector<double>& ndcg) {
    std::snprintf(buf, sizeof(buf), "%-10s %8zu", label.c_str(), count);
    os << buf;
    for (std::size_t i = 0; i < r.ks.size(); ++i) {
      std::snprintf(buf, sizeof(buf), " %10.4f %10.4f", rec[i], ndcg[i]);
      os << buf;
    }
    os << '\n';
  };
  row("all", r.evaluated_objects, r.recall, r.ndcg);
  for (const auto& b : r.buckets) row(b.label, b.objects, b.recall, b.ndcg);
  return os.str();
}

void write_report_csv(std::ostream& out, const EvalReport& r, const KnowledgeGraph* kg) {
  out << "object,train_tags,test_tags";
  for (std::size_t k : r.ks) out << ",recall@" << k << ",ndcg@" << k;
  out << '\n';
  char buf[64];
  for (const auto& om : r.objects) {
    if (kg != nullptr) {
      out << '"' << kg->objects().name(om.object) << '"';
    } else {
      out << om.object;
    }
    out << ',' << om.train_tags << ',' << om.test_tags;
    for (std::size_t i = 0; i < r.ks.size(); ++i) {
      std::snprintf(buf, sizeof(buf), ",%.6f,%.6f", om.recall[i], om.ndcg[i]);
      out << buf;
    }
    out << '\n';
  }
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  require(spec.clusters > 0 && spec.objects_per_cluster > 0 && spec.tags_per_cluster > 0 &&
              spec.users_per_cluster > 0 && spec.profiles_per_cluster > 0,
          ErrorKind::kInvalidArgument, "synthetic: cluster sizes must be positive");
  auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  require(prob_ok(spec.intra_prob) && prob_ok(spec.noise_prob) && spec.holdout_ratio >= 0.0 &&
              spec.holdout_ratio < 1.0,
          ErrorKind::kInvalidArgument, "synthetic: probabilities must lie in [0,1]");

  const std::size_t c_n = spec.clusters;
  const std::size_t opc = spec.objects_per_cluster;
  const std::size_t tpc = spec.tags_per_cluster;
  const std::size_t upc = spec.users_per_cluster;
  SyntheticData out;
  KnowledgeGraph& kg = out.kg;
  for (std::size_t c = 0; c < c_n; ++c) {
    for (std::size_t i = 0; i < upc; ++i) kg.users().intern("c" + std::to_string(c) + "_u" + std::to_string(i));
    for (std::size_t i = 0; i < opc; ++i) kg.objects().intern("c" + std::to_string(c) + "_o" + std::to_string(i));
    for (std::size_t i = 0; i < tpc; ++i) kg.tags().intern("c" + std::to_string(c) + "_t" + std::to_string(i));
    for (std::size_t i = 0; i < opc; ++i) out.object_cluster.push_back(static_cast<std::uint32_t>(c));
    for (std::size_t i = 0; i < tpc; ++i) out.tag_cluster.push_back(static_cast<std::uint32_t>(c));
  }

  Rng rng = make_rng(spec.seed, "synthetic");
  const std::size_t n_obj = c_n * opc;
  const std::size_t n_tag = c_n * tpc;
  const std::size_t ppc = spec.profiles_per_cluster;

  // Cluster tags, objects and users are dealt round-robin into profiles.
  // Within a profile every user-object and object-tag link exists with
  // probability intra_prob; each object keeps at least one tag.
  auto object_profile = [&](std::size_t o) { return (o / opc) * ppc + (o % opc) % ppc; };
  auto user_profile = [&](std::size_t u) { return (u / upc) * ppc + (u % upc) % ppc; };
  auto tag_profile = [&](std::size_t t) { return (t / tpc) * ppc + (t % tpc) % ppc; };

  for (std::size_t u = 0; u < c_n * upc; ++u) {
    for (std::size_t o = 0; o < n_obj; ++o) {
      bool link = false;
      if (out.object_cluster[o] != u / upc) {
        link = uniform01(rng) < spec.noise_prob;
      } else if (object_profile(o) == user_profile(u)) {
        link = uniform01(rng) < spec.intra_prob;
      }
      if (link) kg.add_ids(Relation::kInteract, static_cast<EntityId>(u), static_cast<EntityId>(o));
    }
  }
  std::vector<std::vector<std::size_t>> planted(n_obj);
  for (std::size_t o = 0; o < n_obj; ++o) {
    const std::size_t c = o / opc;
    std::vector<std::size_t> own;
    for (std::size_t t = 0; t < tpc; ++t) {
      if (tag_profile(c * tpc + t) != object_profile(o)) continue;
      own.push_back(t);
      if (uniform01(rng) < spec.intra_prob) planted[o].push_back(t);
    }
    if (planted[o].empty() && !own.empty()) planted[o].push_back(own[rng() % own.size()]);
  }

  std::vector<IdPair> intra;
  std::vector<IdPair> noise;
  for (std::size_t o = 0; o < n_obj; ++o) {
    const std::size_t c = out.object_cluster[o];
    for (std::size_t t = 0; t < n_tag; ++t) {
      const auto oid = static_cast<EntityId>(o);
      const auto tid = static_cast<EntityId>(t);
      if (out.tag_cluster[t] == c) {
        if (std::binary_search(planted[o].begin(), planted[o].end(), t - c * tpc)) {
          kg.add_ids(Relation::kTaggedWith, oid, tid);
          intra.emplace_back(oid, tid);
        }
      } else if (uniform01(rng) < spec.noise_prob) {
        kg.add_ids(Relation::kTaggedWith, oid, tid);
        noise.emplace_back(oid, tid);
      }
    }
  }

  // Hold out a share of the intra-cluster links; noise links always train.
  std::vector<std::size_t> perm(intra.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng split_rng = make_rng(spec.seed, "split");
  std::shuffle(perm.begin(), perm.end(), split_rng);
  const auto n_test = static_cast<std::size_t>(
      std::llround(spec.holdout_ratio * static_cast<double>(intra.size())));
  std::vector<char> held(intra.size(), 0);
  for (std::size_t i = 0; i < n_test; ++i) held[perm[i]] = 1;

  std::vector<char> is_test_pair;
  for (const auto& p : kg.tagged_pairs()) {
    const auto it = std::find(intra.begin(), intra.end(), p);
    const bool test = it != intra.end() && held[static_cast<std::size_t>(it - intra.begin())];
    (test ? out.split.test : out.split.train).push_back(p);
  }
  out.split.ratio = 1.0 - spec.holdout_ratio;
  out.split.seed = spec.seed;
  return out;
}

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
  SyntheticSpec s;
  require(j.is_object(), ErrorKind::kParse, "synthetic spec: expected a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "clusters") s.clusters = value.get<std::size_t>();
      else if (key == "objects_per_cluster") s.objects_per_cluster = value.get<std::size_t>();
      else if (key == "tags_per_cluster") s.tags_per_cluster = value.get<std::size_t>();
      else if (key == "users_per_cluster") s.users_per_cluster = value.get<std::size_t>();
      else if (key == "profiles_per_cluster") s.profiles_per_cluster = value.get<std::size_t>();
      else if (key == "intra_prob") s.intra_prob = value.get<double>();
      else if (key == "noise_prob") s.noise_prob = value.get<double>();
      else if (key == "holdout_ratio") s.holdout_ratio = value.get<double>();
      else if (key == "seed") s.seed = value.get<std::uint64_t>();
      else fail(ErrorKind::kInvalidArgument, "synthetic spec: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, std::string("synthetic spec: ") + e.what());
  }
  return s;
}

}  // namespace dge
