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

#include <span>

#include "dge/trainer.hpp"

namespace dge {

// First-order baselines. Both are the shared trainer with free lookup
// embeddings in place of the graph encoders; they differ only in the loss.

struct FactorModel {
  DenseMatrix object_factors;
  DenseMatrix tag_factors;
  LossKind loss = LossKind::kNce;
  std::vector<double> loss_trace;
};

FactorModel to_factor_model(const TrainedModel& m);

/// Squared-error matrix factorization with K sampled unobserved tags per
/// positive. `config.factor_dim` sets the embedding size.
FactorModel train_mf(const KnowledgeGraph& kg, std::span<const IdPair> train_pairs,
                     TrainConfig config);

/// Free-embedding skip-gram trained with the NCE decoder.
FactorModel train_skipgram(const KnowledgeGraph& kg, std::span<const IdPair> train_pairs,
                           TrainConfig config);

}  // namespace dge
