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
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dge/dualgraph.hpp"
#include "dge/kg.hpp"
#include "dge/model.hpp"
#include "dge/rng.hpp"

#include <json.hpp>

namespace dge {

enum class LossKind : std::uint8_t { kNce, kMse };
enum class NegativeSampling : std::uint8_t { kNoise, kUniform };

/// Which encoders, loss and negative sampler a named model uses.
struct ModelLayout {
  EncoderKind object_encoder = EncoderKind::kGcn;
  EncoderKind tag_encoder = EncoderKind::kGcn;
  LossKind loss = LossKind::kNce;
  NegativeSampling sampling = NegativeSampling::kNoise;
};

/// "dge", "so-ge", "st-ge", "skipgram" or "mf".
ModelLayout model_layout(const std::string& model);

struct TrainConfig {
  std::string model = "dge";
  std::size_t batch_size = 64;
  std::size_t epochs = 300;
  double learning_rate = 2e-3;
  std::size_t negatives = 15;
  double noise_exponent = 0.75;
  double noise_smoothing = 1.0;
  std::size_t object_hidden = 32;
  std::size_t tag_hidden = 32;
  std::size_t output_dim = 16;
  std::size_t factor_dim = 100;  // embedding size of the lookup baselines
  double k_object = 0.1;
  double k_tag = 1.0;
  CorpusTotal corpus_total = CorpusTotal::kSymmetric;
  bool mf_uniform_negatives = true;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t checkpoint_interval = 0;  // epochs; 0 disables

  void validate() const;
};

/// Named presets: "movielens", "lastfm", "steam".
TrainConfig config_profile(const std::string& name);

nlohmann::ordered_json to_json(const TrainConfig& c);
/// Overlays the keys present in `j` onto `base`; unknown keys are errors.
TrainConfig config_from_json(const nlohmann::json& j, TrainConfig base = {});

/// pn(t) proportional to (count(t) + smoothing)^exponent over `num_tags`.
std::vector<double> build_noise(std::span<const IdPair> train_pairs, std::size_t num_tags,
                                double exponent, double smoothing);

class NegativeSampler {
 public:
  explicit NegativeSampler(std::span<const double> weights);

  static constexpr int kMaxRedraws = 16;

  /// K i.i.d. draws; a draw inside `exclude` (sorted) is redrawn up to
  /// kMaxRedraws times and then kept.
  std::vector<EntityId> sample(Rng& rng, std::size_t k, std::span<const EntityId> exclude);

 private:
  std::discrete_distribution<std::size_t> dist_;
};

/// Glorot-uniform init of the matrices each encoder needs.
ModelParams init_params(const EncoderSpec& object_spec, const EncoderSpec& tag_spec,
                        std::uint64_t seed);

struct AdamState {
  std::array<DenseMatrix, 4> m;
  std::array<DenseMatrix, 4> v;
  std::uint64_t step = 0;
};

/// Bias-corrected Adam. Throws kNumeric on a non-finite gradient.
void adam_step(ModelParams& params, const ParamGrads& grads, AdamState& state,
               const TrainConfig& config);

struct TrainedModel {
  TrainConfig config;
  EncoderSpec object_spec;
  EncoderSpec tag_spec;
  ModelParams params;
  DenseMatrix z_object;
  DenseMatrix z_tag;
  std::vector<double> loss_trace;  // mean loss per positive pair, per epoch
  std::size_t epochs_completed = 0;
  std::size_t steps = 0;
  std::vector<IdPair> train_pairs;
};

struct TrainHooks {
  std::function<void(std::size_t epoch, double mean_loss)> on_epoch;
  std::function<void(const TrainedModel&)> on_checkpoint;
  std::function<void(const TrainedModel&)> on_failure;
};

/// Graph inputs of one run: object graph over all interactions, tag graph
/// over training pairs only.
struct DualGraphs {
  SppmiGraph object;
  SppmiGraph tag;
  std::shared_ptr<const SparseMatrix> object_adj;
  std::shared_ptr<const SparseMatrix> tag_adj;
};

DualGraphs build_dual_graphs(const KnowledgeGraph& kg, std::span<const IdPair> train_pairs,
                             double k_object, double k_tag,
                             CorpusTotal total = CorpusTotal::kSymmetric);

/// Encoder specs for the configured model on a graph of the given size.
std::pair<EncoderSpec, EncoderSpec> encoder_specs(const ModelLayout& layout,
                                                  const TrainConfig& config,
                                                  std::size_t num_objects, std::size_t num_tags);

/// Mini-batch NCE (or MSE) training with Adam over `train_pairs`.
TrainedModel train(const KnowledgeGraph& kg, std::span<const IdPair> train_pairs,
                   const TrainConfig& config, const TrainHooks& hooks = {});

/// Same as train() with an explicit layout instead of config.model.
TrainedModel train_with_layout(const KnowledgeGraph& kg, std::span<const IdPair> train_pairs,
                               const TrainConfig& config, const ModelLayout& layout,
                               const TrainHooks& hooks = {});

}  // namespace dge
