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

#include "dge/baselines.hpp"

namespace dge {

FactorModel to_factor_model(const TrainedModel& m) {
  FactorModel f;
  f.object_factors = m.z_object;
  f.tag_factors = m.z_tag;
  f.loss = model_layout(m.config.model).loss;
  f.loss_trace = m.loss_trace;
  return f;
}

FactorModel train_mf(const KnowledgeGraph& kg, std::span<const IdPair> train_pairs,
                     TrainConfig config) {
  config.model = "mf";
  return to_factor_model(train(kg, train_pairs, config));
}

FactorModel train_skipgram(const KnowledgeGraph& kg, std::span<const IdPair> train_pairs,
                           TrainConfig config) {
  config.model = "skipgram";
  return to_factor_model(train(kg, train_pairs, config));
}

}  // namespace dge
