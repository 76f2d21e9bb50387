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

#include "dge/baselines.hpp"
#include "dge/eval.hpp"

namespace dge {
namespace {

SyntheticData small_data() {
  SyntheticSpec spec;
  spec.clusters = 2;
  spec.objects_per_cluster = 6;
  spec.tags_per_cluster = 4;
  spec.users_per_cluster = 4;
  spec.profiles_per_cluster = 2;
  return generate_synthetic(spec);
}

TrainConfig small_config() {
  TrainConfig c;
  c.epochs = 10;
  c.batch_size = 8;
  c.negatives = 3;
  c.factor_dim = 6;
  c.learning_rate = 0.02;
  return c;
}

TEST(Baselines, MfWithNceLayoutIsSkipgram) {
  const auto d = small_data();
  auto c = small_config();
  c.model = "mf";
  const ModelLayout nce{EncoderKind::kLookup, EncoderKind::kLookup, LossKind::kNce, NegativeSampling::kNoise};
  const auto a = train_with_layout(d.kg, d.split.train, c, nce);
  const auto b = train_skipgram(d.kg, d.split.train, small_config());
  EXPECT_EQ(a.z_object, b.object_factors);
  EXPECT_EQ(a.z_tag, b.tag_factors);
  EXPECT_EQ(a.loss_trace, b.loss_trace);
}

TEST(Baselines, NamedModelMatchesWrapper) {
  const auto d = small_data();
  auto c = small_config();
  c.model = "mf";
  const auto via_train = to_factor_model(train(d.kg, d.split.train, c));
  const auto via_wrapper = train_mf(d.kg, d.split.train, small_config());
  EXPECT_EQ(via_train.object_factors, via_wrapper.object_factors);
  EXPECT_EQ(via_wrapper.loss, LossKind::kMse);
  EXPECT_EQ(via_wrapper.object_factors.cols(), 6u);
}

TEST(Baselines, ZeroLearningRateKeepsInitialFactors) {
  const auto d = small_data();
  auto c = small_config();
  c.learning_rate = 0.0;
  for (const char* name : {"mf", "skipgram"}) {
    c.model = name;
    const auto m = train(d.kg, d.split.train, c);
    const auto init = init_params(m.object_spec, m.tag_spec, c.seed);
    EXPECT_EQ(m.z_object, init.mats[kObjectW0]) << name;
    EXPECT_EQ(m.z_tag, init.mats[kTagW0]) << name;
  }
}

TEST(Baselines, MfFitsToyExactly) {
  // each object has one tag; every other tag is a negative
  KnowledgeGraph kg;
  for (int i = 0; i < 4; ++i) kg.add(Relation::kTaggedWith, "o" + std::to_string(i), "t" + std::to_string(i));
  std::vector<IdPair> pairs;
  for (EntityId i = 0; i < 4; ++i) pairs.push_back({i, i});
  auto c = small_config();
  c.epochs = 2000;
  c.batch_size = 4;
  c.learning_rate = 0.01;
  const auto m = train_mf(kg, pairs, c);
  EXPECT_LT(m.loss_trace.back(), 1e-3);
  for (EntityId i = 0; i < 4; ++i) {
    EXPECT_NEAR(score(m.object_factors, m.tag_factors, i, i), 1.0, 0.05);
  }
}

}  // namespace
}  // namespace dge
