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

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "dge/kg.hpp"
#include "dge/linalg.hpp"

namespace dge {

// ---------------------------------------------------------------------------
// Encoders
// ---------------------------------------------------------------------------

/// gcn: Z = A ReLU(A W0) W1. mlp: Z = ReLU(W0) W1 (the gcn with A = I).
/// lookup: Z = W0, a free embedding table with no second layer.
enum class EncoderKind : std::uint8_t { kGcn, kMlp, kLookup };

std::string_view encoder_kind_name(EncoderKind kind);
EncoderKind parse_encoder_kind(std::string_view name);

struct EncoderSpec {
  EncoderKind kind = EncoderKind::kGcn;
  std::size_t input_dim = 0;   // node count; features are one-hot
  std::size_t hidden_dim = 0;  // unused by lookup
  std::size_t output_dim = 0;
};

/// Intermediate values of one encoder pass.
struct EncoderCache {
  DenseMatrix pre;     // A W0 (or W0), before ReLU
  DenseMatrix hidden;  // ReLU(pre)
  DenseMatrix z;
};

struct LayerGrads {
  DenseMatrix d_w0;
  DenseMatrix d_w1;
};

EncoderCache gcn_forward(const SparseMatrix& adj, const DenseMatrix& w0, const DenseMatrix& w1);
LayerGrads gcn_backward(const SparseMatrix& adj, const EncoderCache& cache, const DenseMatrix& w1,
                        const DenseMatrix& d_z);

EncoderCache mlp_forward(const DenseMatrix& w0, const DenseMatrix& w1);
LayerGrads mlp_backward(const EncoderCache& cache, const DenseMatrix& w1, const DenseMatrix& d_z);

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

enum ParamSlot : std::size_t { kObjectW0 = 0, kObjectW1 = 1, kTagW0 = 2, kTagW1 = 3 };
inline constexpr std::array<std::string_view, 4> kParamNames = {"W_O0", "W_O1", "W_T0", "W_T1"};

/// The four trainable matrices. Lookup encoders leave their W1 slot empty
/// (0x0). `generation` is bumped on every update so stale forward caches can
/// be detected.
struct ModelParams {
  std::array<DenseMatrix, 4> mats;
  std::uint64_t generation = 0;

  friend bool operator==(const ModelParams& a, const ModelParams& b) { return a.mats == b.mats; }
};

using ParamGrads = std::array<DenseMatrix, 4>;

// ---------------------------------------------------------------------------
// Dual encoder
// ---------------------------------------------------------------------------

struct DualForward {
  EncoderCache object;
  EncoderCache tag;
  std::uint64_t generation = 0;

  const DenseMatrix& z_object() const { return object.z; }
  const DenseMatrix& z_tag() const { return tag.z; }
};

/// Object and tag encoders bound to their normalized adjacencies. GCN sides
/// need a square adjacency of matching size; other kinds ignore it.
class DualEncoder {
 public:
  DualEncoder(EncoderSpec object_spec, EncoderSpec tag_spec,
              std::shared_ptr<const SparseMatrix> object_adj,
              std::shared_ptr<const SparseMatrix> tag_adj);

  const EncoderSpec& object_spec() const noexcept { return object_spec_; }
  const EncoderSpec& tag_spec() const noexcept { return tag_spec_; }

  /// Throws kInvalidArgument if any matrix has the wrong shape.
  void check_params(const ModelParams& params) const;

  DualForward forward(const ModelParams& params) const;
  /// Chains decoder gradients through both encoders. Throws kState when the
  /// forward pass was computed from an older parameter generation.
  ParamGrads backward(const ModelParams& params, const DualForward& fwd, const DenseMatrix& d_z_object,
                      const DenseMatrix& d_z_tag) const;

 private:
  EncoderCache encode(const EncoderSpec& spec, const SparseMatrix* adj, const DenseMatrix& w0,
                      const DenseMatrix& w1) const;
  LayerGrads encode_backward(const EncoderSpec& spec, const SparseMatrix* adj,
                             const EncoderCache& cache, const DenseMatrix& w0,
                             const DenseMatrix& w1, const DenseMatrix& d_z) const;

  EncoderSpec object_spec_;
  EncoderSpec tag_spec_;
  std::shared_ptr<const SparseMatrix> object_adj_;
  std::shared_ptr<const SparseMatrix> tag_adj_;
};

// ---------------------------------------------------------------------------
// Skip-gram decoder
// ---------------------------------------------------------------------------

/// Inner product of object row i and tag row j.
double score(const DenseMatrix& z_object, const DenseMatrix& z_tag, std::size_t object,
             std::size_t tag);

/// Numerically stable softmax over one score row.
std::vector<double> softmax_row(std::span<const double> scores);

double sigmoid(double x);
/// log(1 + exp(x)) without overflow.
double softplus(double x);

/// p(y=1 | s) = sigmoid(s - log(K * pn)).
double nce_posterior(double s, double k, double pn);
/// p(y=0 | s) = 1 - nce_posterior.
double nce_negative_prob(double s, double k, double pn);

/// One observed (object, tag) pair plus its sampled negatives.
struct TrainingExample {
  EntityId object = 0;
  EntityId positive = 0;
  std::vector<EntityId> negatives;
};

struct DecoderLoss {
  double loss = 0.0;
  DenseMatrix d_z_object;
  DenseMatrix d_z_tag;
};

/// Negated NCE log-likelihood summed over the batch:
///   -sum [ log p(y=1|t+,o) + sum_k log p(y=0|t_k,o) ]
/// `noise_k` is the K of the posterior (usually the negatives count).
DecoderLoss nce_loss_and_grads(std::span<const TrainingExample> batch, const DenseMatrix& z_object,
                               const DenseMatrix& z_tag, std::span<const double> noise,
                               double noise_k);

/// Squared error sum (s - y)^2 with y=1 for positives and y=0 for negatives.
DecoderLoss mse_loss_and_grads(std::span<const TrainingExample> batch, const DenseMatrix& z_object,
                               const DenseMatrix& z_tag);

}  // namespace dge
