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

#include <cmath>
#include <map>

#include "dge/error.hpp"
#include "dge/eval.hpp"
#include "dge/trainer.hpp"
#include "test_util.hpp"

namespace dge {
namespace {

struct SyntheticFixture {
  SyntheticData data;
  TrainConfig config;
};

SyntheticFixture small_synthetic() {
  SyntheticSpec spec;
  spec.clusters = 3;
  spec.objects_per_cluster = 8;
  spec.tags_per_cluster = 6;
  spec.users_per_cluster = 6;
  spec.profiles_per_cluster = 2;
  SyntheticFixture f{generate_synthetic(spec), {}};
  f.config.epochs = 20;
  f.config.batch_size = 16;
  f.config.negatives = 5;
  f.config.object_hidden = f.config.tag_hidden = 8;
  f.config.output_dim = 4;
  f.config.learning_rate = 0.01;
  f.config.k_object = 1.0;
  return f;
}

TEST(Train, OneEpochOverOnePairIsOneStep) {
  KnowledgeGraph kg;
  kg.add(Relation::kInteract, "u", "o");
  kg.add(Relation::kTaggedWith, "o", "t");
  TrainConfig c;
  c.epochs = 1;
  const std::vector<IdPair> pairs{{0, 0}};
  const auto m = train(kg, pairs, c);
  EXPECT_EQ(m.steps, 1u);
  EXPECT_EQ(m.loss_trace.size(), 1u);
  EXPECT_EQ(m.epochs_completed, 1u);
}

TEST(Train, StepCountIsCeilOfPairsOverBatch) {
  auto f = small_synthetic();
  f.config.epochs = 3;
  f.config.batch_size = 7;
  const auto m = train(f.data.kg, f.data.split.train, f.config);
  EXPECT_EQ(m.steps, 3 * ((f.data.split.train.size() + 6) / 7));
}

TEST(Train, LossDecreasesOnSynthetic) {
  auto f = small_synthetic();
  const auto m = train(f.data.kg, f.data.split.train, f.config);
  ASSERT_EQ(m.loss_trace.size(), f.config.epochs);
  EXPECT_LT(m.loss_trace.back(), m.loss_trace.front());
}

TEST(Train, SameSeedIsBitExact) {
  auto f = small_synthetic();
  f.config.epochs = 5;
  const auto a = train(f.data.kg, f.data.split.train, f.config);
  const auto b = train(f.data.kg, f.data.split.train, f.config);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.z_object, b.z_object);
  EXPECT_EQ(a.loss_trace, b.loss_trace);
  f.config.seed = 1;
  const auto c = train(f.data.kg, f.data.split.train, f.config);
  EXPECT_FALSE(a.params == c.params);
}

TEST(Train, ZeroLearningRateKeepsInitialParameters) {
  auto f = small_synthetic();
  f.config.epochs = 3;
  f.config.learning_rate = 0.0;
  const auto m = train(f.data.kg, f.data.split.train, f.config);
  EXPECT_EQ(m.params, init_params(m.object_spec, m.tag_spec, f.config.seed));
}

TEST(Train, CallbacksFireAtIntervals) {
  auto f = small_synthetic();
  f.config.epochs = 7;
  f.config.checkpoint_interval = 3;
  std::vector<std::size_t> epochs;
  std::vector<std::size_t> snapshots;
  TrainHooks hooks;
  hooks.on_epoch = [&](std::size_t e, double) { epochs.push_back(e); };
  hooks.on_checkpoint = [&](const TrainedModel& m) { snapshots.push_back(m.epochs_completed); };
  train(f.data.kg, f.data.split.train, f.config, hooks);
  EXPECT_EQ(epochs, (std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7}));
  EXPECT_EQ(snapshots, (std::vector<std::size_t>{3, 6}));
}

TEST(Train, NonFiniteLossCallsFailureHookThenThrows) {
  auto f = small_synthetic();
  f.config.learning_rate = 1e300;
  bool failed = false;
  TrainHooks hooks;
  hooks.on_failure = [&](const TrainedModel&) { failed = true; };
  try {
    train(f.data.kg, f.data.split.train, f.config, hooks);
    FAIL() << "expected a numeric error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumeric);
  }
  EXPECT_TRUE(failed);
}

TEST(Train, EmptySplitAndBadConfigAreRejected) {
  auto f = small_synthetic();
  EXPECT_THROW(train(f.data.kg, std::vector<IdPair>{}, f.config), Error);
  f.config.batch_size = 0;
  EXPECT_THROW(train(f.data.kg, f.data.split.train, f.config), Error);
}

TEST(Train, TwoObjectToyReachesConfidentPosterior) {
  KnowledgeGraph kg;
  kg.add(Relation::kTaggedWith, "o1", "t1");
  kg.add(Relation::kTaggedWith, "o2", "t2");
  kg.add(Relation::kTaggedWith, "o2", "t3");
  const std::vector<IdPair> pairs{{0, 0}, {1, 1}};
  TrainConfig c;
  c.model = "skipgram";
  c.factor_dim = 4;
  c.negatives = 2;
  c.batch_size = 2;
  c.epochs = 500;
  c.learning_rate = 0.05;
  const auto m = train(kg, pairs, c);
  EXPECT_EQ(m.steps, 500u);
  const auto noise = build_noise(pairs, 3, c.noise_exponent, c.noise_smoothing);
  for (const auto& [o, t] : pairs) {
    const double p = nce_posterior(score(m.z_object, m.z_tag, o, t), 2.0, noise[t]);
    EXPECT_GT(p, 0.9) << o << "," << t;
  }
}

TEST(InitParams, GlorotBoundsAndDeterminism) {
  const EncoderSpec o{EncoderKind::kGcn, 50, 16, 8};
  const EncoderSpec t{EncoderKind::kLookup, 30, 0, 8};
  const auto p = init_params(o, t, 9);
  EXPECT_EQ(p, init_params(o, t, 9));
  EXPECT_FALSE(p == init_params(o, t, 10));
  ASSERT_EQ(p.mats[kObjectW0].rows(), 50u);
  ASSERT_EQ(p.mats[kObjectW1].rows(), 16u);
  ASSERT_EQ(p.mats[kTagW0].cols(), 8u);
  EXPECT_EQ(p.mats[kTagW1].size(), 0u);
  for (const auto& m : p.mats) {
    if (m.size() == 0) continue;
    const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    double mean = 0.0;
    double sq = 0.0;
    for (double v : m.values()) {
      EXPECT_LE(std::abs(v), bound);
      mean += v;
      sq += v * v;
    }
    mean /= static_cast<double>(m.size());
    const double var = sq / static_cast<double>(m.size()) - mean * mean;
    // uniform(-b, b) has variance b^2 / 3
    EXPECT_NEAR(mean, 0.0, 4 * bound / std::sqrt(3.0 * m.size()));
    EXPECT_NEAR(var, bound * bound / 3.0, 0.25 * bound * bound / 3.0);
  }
}

TEST(BuildNoise, ExponentZeroIsUniform) {
  const std::vector<IdPair> pairs{{0, 0}, {1, 0}, {2, 0}, {0, 1}};
  for (double p : build_noise(pairs, 4, 0.0, 1.0)) EXPECT_DOUBLE_EQ(p, 0.25);
}

TEST(BuildNoise, LinearExponentFollowsCounts) {
  const std::vector<IdPair> pairs{{0, 0}, {1, 0}, {2, 0}, {0, 1}};
  const auto p = build_noise(pairs, 2, 1.0, 0.0);
  EXPECT_DOUBLE_EQ(p[0], 0.75);
  EXPECT_DOUBLE_EQ(p[1], 0.25);
  const auto smoothed = build_noise(pairs, 3, 0.75, 1.0);
  EXPECT_NEAR(smoothed[0] / smoothed[2], std::pow(4.0, 0.75), 1e-12);
  EXPECT_GT(smoothed[2], 0.0);
}

TEST(NegativeSampler, ConcentratedDistribution) {
  NegativeSampler s(std::vector<double>{0.0, 1.0, 0.0});
  Rng rng(1);
  for (EntityId t : s.sample(rng, 50, {})) EXPECT_EQ(t, 1u);
}

TEST(NegativeSampler, SameSeedSameDraws) {
  NegativeSampler s(std::vector<double>{0.2, 0.3, 0.5});
  Rng a(5);
  Rng b(5);
  EXPECT_EQ(s.sample(a, 100, {}), s.sample(b, 100, {}));
}

TEST(NegativeSampler, ReturnsExactlyKAndAvoidsExcluded) {
  NegativeSampler s(std::vector<double>{1, 1, 1, 1});
  Rng rng(6);
  const std::vector<EntityId> exclude{1, 3};
  for (std::size_t k : {1u, 15u, 30u}) {
    const auto draws = s.sample(rng, k, exclude);
    EXPECT_EQ(draws.size(), k);
    for (EntityId t : draws) EXPECT_TRUE(t == 0 || t == 2);
  }
}

TEST(NegativeSampler, FrequenciesMatchDistribution) {
  const std::vector<double> w{0.1, 0.2, 0.3, 0.4};
  NegativeSampler s(w);
  Rng rng(7);
  const std::size_t n = 200000;
  std::map<EntityId, double> count;
  for (EntityId t : s.sample(rng, n, {})) count[t] += 1;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double expect = w[i] * n;
    chi2 += (count[i] - expect) * (count[i] - expect) / expect;
  }
  // 3 degrees of freedom; 16.27 is the 0.999 quantile
  EXPECT_LT(chi2, 16.27);
}

TEST(Adam, ZeroGradientLeavesParamsUnchanged) {
  std::mt19937_64 rng(8);
  ModelParams p;
  ParamGrads g;
  for (std::size_t s = 0; s < 4; ++s) {
    p.mats[s] = testing::random_dense(3, 2, rng);
    g[s] = DenseMatrix(3, 2);
  }
  const auto before = p;
  AdamState state;
  adam_step(p, g, state, TrainConfig{});
  EXPECT_EQ(p, before);
  EXPECT_EQ(p.generation, 1u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  ModelParams p;
  ParamGrads g;
  for (std::size_t s = 0; s < 4; ++s) {
    p.mats[s] = DenseMatrix(2, 2, 1.0);
    g[s] = DenseMatrix(2, 2, std::vector<double>{0.5, -3.0, 100.0, -1e-3});
  }
  TrainConfig c;
  c.learning_rate = 0.01;
  AdamState state;
  adam_step(p, g, state, c);
  const std::vector<double> expect{1 - 0.01, 1 + 0.01, 1 - 0.01, 1 + 0.01};
  for (std::size_t s = 0; s < 4; ++s) {
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(p.mats[s].values()[i], expect[i], 1e-6);
  }
}

TEST(Adam, NonFiniteGradientIsNumericError) {
  ModelParams p;
  ParamGrads g;
  for (std::size_t s = 0; s < 4; ++s) {
    p.mats[s] = DenseMatrix(1, 1, 0.0);
    g[s] = DenseMatrix(1, 1, 0.0);
  }
  g[2](0, 0) = std::nan("");
  AdamState state;
  try {
    adam_step(p, g, state, TrainConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumeric);
  }
}

TEST(NceLoss, MoreNegativesAddTerms) {
  std::mt19937_64 rng(9);
  const auto zo = testing::random_dense(3, 4, rng);
  const auto zt = testing::random_dense(6, 4, rng);
  const std::vector<double> noise(6, 1.0 / 6);
  std::vector<TrainingExample> batch{{0, 1, {2, 3, 4}}};
  const double base = nce_loss_and_grads(batch, zo, zt, noise, 3).loss;
  batch[0].negatives = {2, 3, 4, 5, 0, 2};
  EXPECT_GT(nce_loss_and_grads(batch, zo, zt, noise, 3).loss, base);
}

TEST(Config, JsonRoundTrip) {
  TrainConfig c;
  c.model = "so-ge";
  c.epochs = 17;
  c.learning_rate = 0.125;
  c.k_tag = 3.5;
  c.corpus_total = CorpusTotal::kDirected;
  c.mf_uniform_negatives = false;
  c.seed = 99;
  const auto back = config_from_json(nlohmann::json::parse(to_json(c).dump()));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(Config, UnknownKeyAndBadValues) {
  auto expect_kind = [](const char* text, ErrorKind kind) {
    try {
      config_from_json(nlohmann::json::parse(text));
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), kind) << text;
    }
  };
  expect_kind(R"({"learnin_rate": 0.1})", ErrorKind::kInvalidArgument);
  expect_kind(R"({"epochs": "ten"})", ErrorKind::kParse);
  expect_kind(R"({"k_tag": 0})", ErrorKind::kInvalidArgument);
  expect_kind(R"({"model": "bert"})", ErrorKind::kInvalidArgument);
  expect_kind(R"([1, 2])", ErrorKind::kParse);
}

TEST(Config, Profiles) {
  const auto ml = config_profile("movielens");
  EXPECT_EQ(ml.k_object, 0.1);
  EXPECT_EQ(ml.k_tag, 1.0);
  EXPECT_EQ(ml.output_dim, 16u);
  const auto lf = config_profile("lastfm");
  EXPECT_EQ(lf.object_hidden, 64u);
  EXPECT_EQ(lf.output_dim, 64u);
  const auto st = config_profile("steam");
  EXPECT_EQ(st.k_object, 5.0);
  EXPECT_EQ(st.k_tag, 5.0);
  EXPECT_THROW(config_profile("imdb"), Error);
  // explicit keys after the profile win
  const auto j = nlohmann::json::parse(R"({"profile": "steam", "k_tag": 2.0})");
  EXPECT_EQ(config_from_json(j).k_tag, 2.0);
}

TEST(ModelLayout, NamedVariants) {
  EXPECT_EQ(model_layout("so-ge").tag_encoder, EncoderKind::kMlp);
  EXPECT_EQ(model_layout("st-ge").object_encoder, EncoderKind::kMlp);
  EXPECT_EQ(model_layout("mf").loss, LossKind::kMse);
  EXPECT_EQ(model_layout("skipgram").object_encoder, EncoderKind::kLookup);
  EXPECT_THROW(model_layout("gat"), Error);
}

}  // namespace
}  // namespace dge
