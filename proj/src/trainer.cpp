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

#include "dge/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dge/error.hpp"

namespace dge {

ModelLayout model_layout(const std::string& model) {
  if (model == "dge") return {EncoderKind::kGcn, EncoderKind::kGcn, LossKind::kNce, NegativeSampling::kNoise};
  if (model == "so-ge") return {EncoderKind::kGcn, EncoderKind::kMlp, LossKind::kNce, NegativeSampling::kNoise};
  if (model == "st-ge") return {EncoderKind::kMlp, EncoderKind::kGcn, LossKind::kNce, NegativeSampling::kNoise};
  if (model == "skipgram") {
    return {EncoderKind::kLookup, EncoderKind::kLookup, LossKind::kNce, NegativeSampling::kNoise};
  }
  if (model == "mf") {
    return {EncoderKind::kLookup, EncoderKind::kLookup, LossKind::kMse, NegativeSampling::kUniform};
  }
  fail(ErrorKind::kInvalidArgument,
       "unknown model '" + model + "' (expected dge, so-ge, st-ge, mf or skipgram)");
}

void TrainConfig::validate() const {
  model_layout(model);
  auto positive = [](bool ok, const char* what) {
    require(ok, ErrorKind::kInvalidArgument, std::string("config: ") + what + " must be positive");
  };
  positive(batch_size > 0, "batch_size");
  positive(epochs > 0, "epochs");
  positive(negatives >= 1, "negatives");
  positive(object_hidden > 0 && tag_hidden > 0 && output_dim > 0 && factor_dim > 0, "dimensions");
  positive(k_object > 0 && k_tag > 0, "SPPMI shifts");
  require(learning_rate >= 0 && std::isfinite(learning_rate), ErrorKind::kInvalidArgument,
          "config: learning_rate must be finite and >= 0");
  require(noise_exponent >= 0 && noise_smoothing >= 0, ErrorKind::kInvalidArgument,
          "config: noise exponent and smoothing must be >= 0");
  require(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1 && adam_epsilon > 0,
          ErrorKind::kInvalidArgument, "config: invalid Adam constants");
}

TrainConfig config_profile(const std::string& name) {
  TrainConfig c;
  if (name == "movielens") {
    c.k_object = 0.1;
    c.k_tag = 1.0;
    c.object_hidden = c.tag_hidden = 32;
    c.output_dim = 16;
  } else if (name == "lastfm") {
    c.k_object = 1.0;
    c.k_tag = 1.0;
    c.object_hidden = c.tag_hidden = 64;
    c.output_dim = 64;
  } else if (name == "steam") {
    c.k_object = 5.0;
    c.k_tag = 5.0;
    c.object_hidden = c.tag_hidden = 32;
    c.output_dim = 16;
  } else {
    fail(ErrorKind::kInvalidArgument, "unknown profile '" + name + "' (movielens, lastfm, steam)");
  }
  return c;
}

nlohmann::ordered_json to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["model"] = c.model;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["learning_rate"] = c.learning_rate;
  j["negatives"] = c.negatives;
  j["noise_exponent"] = c.noise_exponent;
  j["noise_smoothing"] = c.noise_smoothing;
  j["object_hidden"] = c.object_hidden;
  j["tag_hidden"] = c.tag_hidden;
  j["output_dim"] = c.output_dim;
  j["factor_dim"] = c.factor_dim;
  j["k_object"] = c.k_object;
  j["k_tag"] = c.k_tag;
  j["corpus_total"] = c.corpus_total == CorpusTotal::kSymmetric ? "symmetric" : "directed";
  j["mf_uniform_negatives"] = c.mf_uniform_negatives;
  j["seed"] = c.seed;
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["adam_epsilon"] = c.adam_epsilon;
  j["checkpoint_interval"] = c.checkpoint_interval;
  return j;
}

TrainConfig config_from_json(const nlohmann::json& j, TrainConfig c) {
  require(j.is_object(), ErrorKind::kParse, "config: expected a JSON object");
  try {
    // the profile goes first so explicit keys override it
    if (j.contains("profile")) {
      auto p = config_profile(j["profile"].get<std::string>());
      c.k_object = p.k_object;
      c.k_tag = p.k_tag;
      c.object_hidden = p.object_hidden;
      c.tag_hidden = p.tag_hidden;
      c.output_dim = p.output_dim;
    }
    for (const auto& [key, value] : j.items()) {
      if (key == "model") c.model = value.get<std::string>();
      else if (key == "profile") continue;
      else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
      else if (key == "epochs") c.epochs = value.get<std::size_t>();
      else if (key == "learning_rate") c.learning_rate = value.get<double>();
      else if (key == "negatives") c.negatives = value.get<std::size_t>();
      else if (key == "noise_exponent") c.noise_exponent = value.get<double>();
      else if (key == "noise_smoothing") c.noise_smoothing = value.get<double>();
      else if (key == "object_hidden") c.object_hidden = value.get<std::size_t>();
      else if (key == "tag_hidden") c.tag_hidden = value.get<std::size_t>();
      else if (key == "output_dim") c.output_dim = value.get<std::size_t>();
      else if (key == "factor_dim") c.factor_dim = value.get<std::size_t>();
      else if (key == "k_object") c.k_object = value.get<double>();
      else if (key == "k_tag") c.k_tag = value.get<double>();
      else if (key == "corpus_total") {
        const auto s = value.get<std::string>();
        require(s == "symmetric" || s == "directed", ErrorKind::kInvalidArgument,
                "config: corpus_total must be 'symmetric' or 'directed'");
        c.corpus_total = s == "symmetric" ? CorpusTotal::kSymmetric : CorpusTotal::kDirected;
      }
      else if (key == "mf_uniform_negatives") c.mf_uniform_negatives = value.get<bool>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "beta1") c.beta1 = value.get<double>();
      else if (key == "beta2") c.beta2 = value.get<double>();
      else if (key == "adam_epsilon") c.adam_epsilon = value.get<double>();
      else if (key == "checkpoint_interval") c.checkpoint_interval = value.get<std::size_t>();
      else fail(ErrorKind::kInvalidArgument, "config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

std::vector<double> build_noise(std::span<const IdPair> train_pairs, std::size_t num_tags,
                                double exponent, double smoothing) {
  require(!train_pairs.empty(), ErrorKind::kData, "build_noise: no training pairs");
  require(exponent >= 0.0 && smoothing >= 0.0, ErrorKind::kInvalidArgument,
          "build_noise: exponent and smoothing must be >= 0");
  std::vector<double> counts(num_tags, 0.0);
  for (const auto& [o, t] : train_pairs) counts.at(t) += 1.0;
  double sum = 0.0;
  for (double& c : counts) {
    c = std::pow(c + smoothing, exponent);
    sum += c;
  }
  for (double& c : counts) c /= sum;
  return counts;
}

NegativeSampler::NegativeSampler(std::span<const double> weights)
    : dist_(weights.begin(), weights.end()) {
  require(!weights.empty(), ErrorKind::kInvalidArgument, "NegativeSampler: empty distribution");
}

std::vector<EntityId> NegativeSampler::sample(Rng& rng, std::size_t k,
                                              std::span<const EntityId> exclude) {
  std::vector<EntityId> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto draw = static_cast<EntityId>(dist_(rng));
    for (int r = 0; r < kMaxRedraws && std::binary_search(exclude.begin(), exclude.end(), draw); ++r) {
      draw = static_cast<EntityId>(dist_(rng));
    }
    out.push_back(draw);
  }
  return out;
}

namespace {

DenseMatrix glorot(std::size_t rows, std::size_t cols, Rng& rng) {
  DenseMatrix m(rows, cols);
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (double& v : m.values()) v = (2.0 * uniform01(rng) - 1.0) * limit;
  return m;
}

void init_side(const EncoderSpec& spec, DenseMatrix& w0, DenseMatrix& w1, Rng& rng) {
  if (spec.kind == EncoderKind::kLookup) {
    w0 = glorot(spec.input_dim, spec.output_dim, rng);
    w1 = DenseMatrix();
  } else {
    w0 = glorot(spec.input_dim, spec.hidden_dim, rng);
    w1 = glorot(spec.hidden_dim, spec.output_dim, rng);
  }
}

}  // namespace

ModelParams init_params(const EncoderSpec& object_spec, const EncoderSpec& tag_spec,
                        std::uint64_t seed) {
  Rng rng = make_rng(seed, "init");
  ModelParams p;
  init_side(object_spec, p.mats[kObjectW0], p.mats[kObjectW1], rng);
  init_side(tag_spec, p.mats[kTagW0], p.mats[kTagW1], rng);
  return p;
}

void adam_step(ModelParams& params, const ParamGrads& grads, AdamState& state,
               const TrainConfig& config) {
  for (std::size_t s = 0; s < 4; ++s) {
    require(grads[s].rows() == params.mats[s].rows() && grads[s].cols() == params.mats[s].cols(),
            ErrorKind::kInvalidArgument, "adam_step: gradient shape mismatch");
    require(grads[s].all_finite(), ErrorKind::kNumeric,
            "adam_step: non-finite gradient in " + std::string(kParamNames[s]));
    if (state.m[s].size() != params.mats[s].size()) {
      state.m[s] = DenseMatrix(params.mats[s].rows(), params.mats[s].cols());
      state.v[s] = DenseMatrix(params.mats[s].rows(), params.mats[s].cols());
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t s = 0; s < 4; ++s) {
    auto& w = params.mats[s].values();
    auto& m = state.m[s].values();
    auto& v = state.v[s].values();
    const auto& g = grads[s].values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      w[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
    }
  }
  ++params.generation;
}

DualGraphs build_dual_graphs(const KnowledgeGraph& kg, std::span<const IdPair> train_pairs,
                             double k_object, double k_tag, CorpusTotal total) {
  DualGraphs g;
  g.object = sppmi(object_cooccurrence(kg), k_object, total);
  const std::vector<IdPair> pairs(train_pairs.begin(), train_pairs.end());
  g.tag = sppmi(tag_cooccurrence(kg.num_objects(), kg.num_tags(), pairs), k_tag, total);
  g.object_adj = std::make_shared<const SparseMatrix>(normalize(g.object).matrix);
  g.tag_adj = std::make_shared<const SparseMatrix>(normalize(g.tag).matrix);
  return g;
}

std::pair<EncoderSpec, EncoderSpec> encoder_specs(const ModelLayout& layout,
                                                  const TrainConfig& config,
                                                  std::size_t num_objects, std::size_t num_tags) {
  const bool lookup = layout.object_encoder == EncoderKind::kLookup ||
                      layout.tag_encoder == EncoderKind::kLookup;
  const std::size_t out = lookup ? config.factor_dim : config.output_dim;
  EncoderSpec o{layout.object_encoder, num_objects, config.object_hidden, out};
  EncoderSpec t{layout.tag_encoder, num_tags, config.tag_hidden, out};
  if (o.kind == EncoderKind::kLookup) o.hidden_dim = 0;
  if (t.kind == EncoderKind::kLookup) t.hidden_dim = 0;
  return {o, t};
}

TrainedModel train(const KnowledgeGraph& kg, std::span<const IdPair> train_pairs,
                   const TrainConfig& config, const TrainHooks& hooks) {
  return train_with_layout(kg, train_pairs, config, model_layout(config.model), hooks);
}

TrainedModel train_with_layout(const KnowledgeGraph& kg, std::span<const IdPair> train_pairs,
                               const TrainConfig& config, const ModelLayout& layout,
                               const TrainHooks& hooks) {
  config.validate();
  require(!train_pairs.empty(), ErrorKind::kData, "train: empty training split");
  const std::size_t n_obj = kg.num_objects();
  const std::size_t n_tag = kg.num_tags();
  for (const auto& [o, t] : train_pairs) {
    require(o < n_obj && t < n_tag, ErrorKind::kInvalidArgument, "train: pair id out of range");
  }

  std::shared_ptr<const SparseMatrix> object_adj;
  std::shared_ptr<const SparseMatrix> tag_adj;
  if (layout.object_encoder == EncoderKind::kGcn || layout.tag_encoder == EncoderKind::kGcn) {
    auto graphs = build_dual_graphs(kg, train_pairs, config.k_object, config.k_tag, config.corpus_total);
    object_adj = graphs.object_adj;
    tag_adj = graphs.tag_adj;
  }

  TrainedModel model;
  model.config = config;
  std::tie(model.object_spec, model.tag_spec) = encoder_specs(layout, config, n_obj, n_tag);
  model.train_pairs.assign(train_pairs.begin(), train_pairs.end());
  const DualEncoder encoder(model.object_spec, model.tag_spec, object_adj, tag_adj);
  model.params = init_params(model.object_spec, model.tag_spec, config.seed);

  const std::vector<double> noise =
      build_noise(train_pairs, n_tag, config.noise_exponent, config.noise_smoothing);
  const bool uniform = layout.sampling == NegativeSampling::kUniform && config.mf_uniform_negatives;
  NegativeSampler sampler(uniform ? std::vector<double>(n_tag, 1.0) : noise);
  // Uniform (MF) sampling avoids every observed tag of the object; noise
  // sampling only avoids the positive itself.
  const auto observed = tag_sets(n_obj, model.train_pairs);

  Rng shuffle_rng = make_rng(config.seed, "shuffle");
  Rng negative_rng = make_rng(config.seed, "negatives");
  AdamState adam;
  std::vector<std::size_t> order(train_pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<TrainingExample> batch;

  auto finalize = [&] {
    auto fwd = encoder.forward(model.params);
    model.z_object = std::move(fwd.object.z);
    model.z_tag = std::move(fwd.tag.z);
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) {
        const auto& [o, t] = train_pairs[order[i]];
        TrainingExample ex;
        ex.object = o;
        ex.positive = t;
        if (uniform) {
          ex.negatives = sampler.sample(negative_rng, config.negatives, observed[o]);
        } else {
          const EntityId self[1] = {t};
          ex.negatives = sampler.sample(negative_rng, config.negatives, self);
        }
        batch.push_back(std::move(ex));
      }

      const DualForward fwd = encoder.forward(model.params);
      DecoderLoss dec = layout.loss == LossKind::kNce
                            ? nce_loss_and_grads(batch, fwd.z_object(), fwd.z_tag(), noise,
                                                 static_cast<double>(config.negatives))
                            : mse_loss_and_grads(batch, fwd.z_object(), fwd.z_tag());
      if (!std::isfinite(dec.loss)) {
        model.epochs_completed = epoch;
        finalize();
        if (hooks.on_failure) hooks.on_failure(model);
        fail(ErrorKind::kNumeric, "train: non-finite loss at epoch " + std::to_string(epoch + 1) +
                                      ", step " + std::to_string(model.steps + 1));
      }
      epoch_loss += dec.loss;
      const ParamGrads grads = encoder.backward(model.params, fwd, dec.d_z_object, dec.d_z_tag);
      try {
        adam_step(model.params, grads, adam, config);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::kNumeric && hooks.on_failure) {
          model.epochs_completed = epoch;
          finalize();
          hooks.on_failure(model);
        }
        throw;
      }
      ++model.steps;
    }
    const double mean = epoch_loss / static_cast<double>(order.size());
    model.loss_trace.push_back(mean);
    model.epochs_completed = epoch + 1;
    if (hooks.on_epoch) hooks.on_epoch(epoch + 1, mean);
    if (hooks.on_checkpoint && config.checkpoint_interval > 0 &&
        (epoch + 1) % config.checkpoint_interval == 0 && epoch + 1 < config.epochs) {
      finalize();
      hooks.on_checkpoint(model);
    }
  }
  finalize();
  return model;
}

}  // namespace dge
