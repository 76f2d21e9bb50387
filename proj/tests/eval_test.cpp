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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "dge/error.hpp"
#include "dge/eval.hpp"
#include "test_util.hpp"

namespace dge {
namespace {

std::vector<IdPair> chain_pairs(std::size_t n) {
  std::vector<IdPair> p;
  for (std::size_t i = 0; i < n; ++i) p.push_back({static_cast<EntityId>(i / 3), static_cast<EntityId>(i)});
  return p;
}

TEST(SplitPairs, SizesDisjointAndCovering) {
  const auto pairs = chain_pairs(10);
  const auto s = split_pairs(pairs, 0.8, 3);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.test.size(), 2u);
  std::set<IdPair> all(s.train.begin(), s.train.end());
  for (const auto& p : s.test) EXPECT_TRUE(all.insert(p).second);
  EXPECT_EQ(all, std::set<IdPair>(pairs.begin(), pairs.end()));
}

TEST(SplitPairs, SeedDeterminesSplit) {
  const auto pairs = chain_pairs(100);
  EXPECT_EQ(split_pairs(pairs, 0.8, 4).test, split_pairs(pairs, 0.8, 4).test);
  EXPECT_NE(split_pairs(pairs, 0.8, 4).test, split_pairs(pairs, 0.8, 5).test);
}

TEST(SplitPairs, InvalidArguments) {
  const auto pairs = chain_pairs(10);
  EXPECT_THROW(split_pairs(pairs, 0.0, 1), Error);
  EXPECT_THROW(split_pairs(pairs, 1.0, 1), Error);
  EXPECT_THROW(split_pairs(chain_pairs(1), 0.5, 1), Error);
}

TEST(SplitPairs, SaveLoadRoundTrip) {
  SyntheticSpec spec;
  spec.clusters = 2;
  const auto data = generate_synthetic(spec);
  const auto path = testing::temp_dir("split") + "/split.tsv";
  save_split(path, data.split, data.kg);
  const auto back = load_split(path, data.kg);
  EXPECT_EQ(back.train, data.split.train);
  EXPECT_EQ(back.test, data.split.test);
}

TEST(RankTags, ZeroScoresKeepIdOrder) {
  const DenseMatrix zo(1, 2);
  const DenseMatrix zt(5, 2);
  EXPECT_EQ(rank_tags(zo, zt, 0, {}), (std::vector<EntityId>{0, 1, 2, 3, 4}));
}

TEST(RankTags, DescendingScoreWithExclusion) {
  const DenseMatrix zo(1, 1, std::vector<double>{1.0});
  const DenseMatrix zt(3, 1, std::vector<double>{0.1, 0.9, 0.5});
  EXPECT_EQ(rank_tags(zo, zt, 0, {}), (std::vector<EntityId>{1, 2, 0}));
  const std::vector<EntityId> excl{1};
  EXPECT_EQ(rank_tags(zo, zt, 0, excl), (std::vector<EntityId>{2, 0}));
}

TEST(RankTags, IsPermutationOfCandidates) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const auto zo = testing::random_dense(3, 4, rng);
    const auto zt = testing::random_dense(25, 4, rng);
    const std::vector<EntityId> excl{2, 7, 11};
    auto r = rank_tags(zo, zt, 1, excl);
    ASSERT_EQ(r.size(), 22u);
    for (std::size_t i = 1; i < r.size(); ++i) {
      EXPECT_GE(score(zo, zt, 1, r[i - 1]), score(zo, zt, 1, r[i]));
    }
    std::sort(r.begin(), r.end());
    EXPECT_TRUE(std::adjacent_find(r.begin(), r.end()) == r.end());
    for (EntityId e : excl) EXPECT_FALSE(std::binary_search(r.begin(), r.end(), e));
  }
}

TEST(Metrics, RecallFixtures) {
  const std::vector<EntityId> ranked{4, 1, 7, 2, 9};
  const std::vector<EntityId> truth{2, 7};
  EXPECT_DOUBLE_EQ(recall_at_k(ranked, truth, 1), 0.0);
  EXPECT_DOUBLE_EQ(recall_at_k(ranked, truth, 3), 0.5);
  EXPECT_DOUBLE_EQ(recall_at_k(ranked, truth, 5), 1.0);
  // denominator is the number of held-out tags even when it exceeds k
  const std::vector<EntityId> many{1, 2, 4, 7, 9};
  EXPECT_DOUBLE_EQ(recall_at_k(ranked, many, 3), 0.6);
  EXPECT_THROW(recall_at_k(ranked, std::vector<EntityId>{}, 3), Error);
}

TEST(Metrics, NdcgFixtures) {
  const std::vector<EntityId> truth{5};
  EXPECT_DOUBLE_EQ(ndcg_at_k(std::vector<EntityId>{5, 1, 2}, truth, 3), 1.0);
  EXPECT_DOUBLE_EQ(ndcg_at_k(std::vector<EntityId>{1, 2, 5}, truth, 3), 0.5);
  EXPECT_DOUBLE_EQ(ndcg_at_k(std::vector<EntityId>{1, 2, 3}, truth, 3), 0.0);
  const std::vector<EntityId> two{1, 5};
  const double expect = (1.0 / std::log2(3.0)) / (1.0 + 1.0 / std::log2(3.0));
  EXPECT_DOUBLE_EQ(ndcg_at_k(std::vector<EntityId>{0, 1, 2, 3}, two, 3), expect);
}

TEST(Metrics, RecallMonotoneAndNdcgBounded) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<EntityId> ranked(20);
    std::iota(ranked.begin(), ranked.end(), 0);
    std::shuffle(ranked.begin(), ranked.end(), rng);
    std::vector<EntityId> truth;
    for (EntityId t = 0; t < 20; ++t) {
      if (rng() % 4 == 0) truth.push_back(t);
    }
    if (truth.empty()) truth.push_back(0);
    double prev = 0.0;
    for (std::size_t k = 1; k <= 20; ++k) {
      const double r = recall_at_k(ranked, truth, k);
      EXPECT_GE(r, prev);
      prev = r;
      const double n = ndcg_at_k(ranked, truth, k);
      EXPECT_GE(n, 0.0);
      EXPECT_LE(n, 1.0 + 1e-12);
    }
    EXPECT_DOUBLE_EQ(prev, 1.0);
  }
}

// Three objects, four tags, one-dimensional embeddings.
TEST(Evaluate, HandFixture) {
  const DenseMatrix zo(3, 1, std::vector<double>{1.0, -1.0, 1.0});
  const DenseMatrix zt(4, 1, std::vector<double>{0.4, 0.3, 0.2, 0.1});
  Split s;
  s.train = {{0, 0}, {1, 3}, {2, 1}};
  s.test = {{0, 1}, {1, 0}, {2, 3}};
  EvalOptions opt;
  opt.ks = {1, 2};
  opt.per_object = true;
  const auto r = evaluate(zo, zt, s, opt);
  // object 0 ranks 1,2,3; object 1 ranks 2,1,0; object 2 ranks 0,2,3
  EXPECT_EQ(r.evaluated_objects, 3u);
  EXPECT_DOUBLE_EQ(r.recall[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.recall[1], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.ndcg[0], 1.0 / 3.0);
  ASSERT_EQ(r.objects.size(), 3u);
  EXPECT_EQ(r.objects[1].recall, (std::vector<double>{0.0, 0.0}));

  opt.exclude_train = false;
  const auto keep = evaluate(zo, zt, s, opt);
  // object 0 now ranks its train tag 0 first and the test tag second
  EXPECT_DOUBLE_EQ(keep.objects[0].recall[0], 0.0);
  EXPECT_DOUBLE_EQ(keep.objects[0].recall[1], 1.0);
}

TEST(Evaluate, PerfectModelScoresOne) {
  // object i and tag i share a one-hot direction
  const std::size_t n = 6;
  DenseMatrix z = DenseMatrix::identity(n);
  Split s;
  for (EntityId i = 0; i < n; ++i) {
    s.train.push_back({i, static_cast<EntityId>((i + 1) % n)});
    s.test.push_back({i, i});
  }
  const auto r = evaluate(z, z, s, {});
  for (double v : r.recall) EXPECT_DOUBLE_EQ(v, 1.0);
  for (double v : r.ndcg) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Evaluate, BucketCountsSumToEvaluated) {
  SyntheticSpec spec;
  const auto data = generate_synthetic(spec);
  std::mt19937_64 rng(43);
  const auto zo = testing::random_dense(data.kg.num_objects(), 4, rng);
  const auto zt = testing::random_dense(data.kg.num_tags(), 4, rng);
  EvalOptions opt;
  opt.per_object = true;
  const auto r = evaluate(zo, zt, data.split, opt);
  std::size_t total = 0;
  for (const auto& b : r.buckets) total += b.objects;
  EXPECT_EQ(total, r.evaluated_objects);
  for (const auto& om : r.objects) {
    const auto& b = *std::find_if(r.buckets.begin(), r.buckets.end(),
                                  [&](const auto& b) { return om.train_tags >= b.lo && om.train_tags < b.hi; });
    EXPECT_GT(b.objects, 0u);
  }
  EXPECT_EQ(r.buckets.size(), 6u);
  EXPECT_EQ(r.buckets.front().label, "0");
  EXPECT_EQ(r.buckets.back().label, "[40,inf)");
}

TEST(Evaluate, RandomEmbeddingsMatchChanceLevel) {
  // each object: 2 train tags, 2 test tags, 20 tags total, so 18 candidates
  const std::size_t n_obj = 5;
  const std::size_t n_tag = 20;
  Split s;
  for (EntityId o = 0; o < n_obj; ++o) {
    for (EntityId j = 0; j < 4; ++j) {
      const IdPair p{o, static_cast<EntityId>((o * 4 + j) % n_tag)};
      (j < 2 ? s.train : s.test).push_back(p);
    }
  }
  std::mt19937_64 rng(44);
  std::normal_distribution<double> g;
  const int trials = 4000;
  double mean = 0.0;
  for (int t = 0; t < trials; ++t) {
    DenseMatrix zo(n_obj, 3);
    DenseMatrix zt(n_tag, 3);
    for (double& v : zo.values()) v = g(rng);
    for (double& v : zt.values()) v = g(rng);
    EvalOptions opt;
    opt.ks = {3};
    mean += evaluate(zo, zt, s, opt).recall[0];
  }
  mean /= trials;
  EXPECT_NEAR(mean, 3.0 / 18.0, 0.01);
}

TEST(Evaluate, RejectsBadInput) {
  const DenseMatrix z(2, 2);
  Split s;
  EXPECT_THROW(evaluate(z, z, s, {}), Error);
  s.test = {{0, 5}};
  EXPECT_THROW(evaluate(z, z, s, {}), Error);
  s.test = {{0, 1}};
  EXPECT_THROW(evaluate(z, DenseMatrix(2, 3), s, {}), Error);
}

TEST(Report, JsonTextAndCsv) {
  const DenseMatrix zo(1, 1, std::vector<double>{1.0});
  const DenseMatrix zt(2, 1, std::vector<double>{1.0, 0.0});
  Split s;
  s.test = {{0, 0}};
  const auto r = evaluate(zo, zt, s, {});
  const auto j = report_json(r);
  EXPECT_EQ(j["metrics"]["recall@3"], 1.0);
  EXPECT_NE(report_text(r).find("Recall@3"), std::string::npos);
  std::ostringstream csv;
  write_report_csv(csv, r);
  EXPECT_FALSE(csv.str().empty());
}

TEST(Synthetic, SameSeedSameGraph) {
  SyntheticSpec spec;
  const auto a = generate_synthetic(spec);
  const auto b = generate_synthetic(spec);
  EXPECT_EQ(a.kg.interact_pairs(), b.kg.interact_pairs());
  EXPECT_EQ(a.kg.tagged_pairs(), b.kg.tagged_pairs());
  EXPECT_EQ(a.split.test, b.split.test);
  spec.seed = 1;
  EXPECT_NE(generate_synthetic(spec).kg.interact_pairs(), a.kg.interact_pairs());
}

TEST(Synthetic, HeldOutLinksAreIntraCluster) {
  SyntheticSpec spec;
  const auto d = generate_synthetic(spec);
  EXPECT_EQ(d.kg.num_objects(), spec.clusters * spec.objects_per_cluster);
  EXPECT_EQ(d.kg.num_tags(), spec.clusters * spec.tags_per_cluster);
  ASSERT_FALSE(d.split.test.empty());
  for (const auto& [o, t] : d.split.test) EXPECT_EQ(d.object_cluster[o], d.tag_cluster[t]);
  EXPECT_EQ(d.split.train.size() + d.split.test.size(), d.kg.tagged_pairs().size());
}

TEST(Synthetic, SpecFromJson) {
  const auto spec = synthetic_spec_from_json(nlohmann::json::parse(R"({"clusters": 3, "seed": 7})"));
  EXPECT_EQ(spec.clusters, 3u);
  EXPECT_EQ(spec.seed, 7u);
  EXPECT_THROW(synthetic_spec_from_json(nlohmann::json::parse(R"({"clustrs": 3})")), Error);
}

}  // namespace
}  // namespace dge
