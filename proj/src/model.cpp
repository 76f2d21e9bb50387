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

#include "dge/model.hpp"

#include <algorithm>
#include <cmath>

#include "dge/error.hpp"

namespace dge {

std::string_view encoder_kind_name(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::kGcn: return "gcn";
    case EncoderKind::kMlp: return "mlp";
    case EncoderKind::kLookup: return "lookup";
  }
  return "?";
}

EncoderKind parse_encoder_kind(std::string_view name) {
  if (name == "gcn") return EncoderKind::kGcn;
  if (name == "mlp") return EncoderKind::kMlp;
  if (name == "lookup") return EncoderKind::kLookup;
  fail(ErrorKind::kInvalidArgument, "unknown encoder kind: " + std::string(name));
}

EncoderCache gcn_forward(const SparseMatrix& adj, const DenseMatrix& w0, const DenseMatrix& w1) {
  require(adj.rows() == adj.cols() && adj.cols() == w0.rows() && w0.cols() == w1.rows(),
          ErrorKind::kInvalidArgument, "gcn_forward: shape mismatch");
  EncoderCache c;
  // One-hot input features: A X W0 reduces to A W0.
  c.pre = spmm(adj, w0);
  c.hidden = relu(c.pre);
  c.z = spmm(adj, matmul(c.hidden, w1));
  return c;
}

LayerGrads gcn_backward(const SparseMatrix& adj, const EncoderCache& cache, const DenseMatrix& w1,
                        const DenseMatrix& d_z) {
  require(d_z.rows() == cache.z.rows() && d_z.cols() == cache.z.cols(),
          ErrorKind::kInvalidArgument, "gcn_backward: upstream gradient shape mismatch");
  // A is symmetric, so A^T products reuse spmm(adj, .).
  const DenseMatrix d_q = spmm(adj, d_z);
  LayerGrads g;
  g.d_w1 = matmul_tn(cache.hidden, d_q);
  const DenseMatrix d_pre = relu_mask_backward(matmul_nt(d_q, w1), cache.pre);
  g.d_w0 = spmm(adj, d_pre);
  return g;
}

EncoderCache mlp_forward(const DenseMatrix& w0, const DenseMatrix& w1) {
  require(w0.cols() == w1.rows(), ErrorKind::kInvalidArgument, "mlp_forward: shape mismatch");
  EncoderCache c;
  c.pre = w0;
  c.hidden = relu(w0);
  c.z = matmul(c.hidden, w1);
  return c;
}

LayerGrads mlp_backward(const EncoderCache& cache, const DenseMatrix& w1, const DenseMatrix& d_z) {
  require(d_z.rows() == cache.z.rows() && d_z.cols() == cache.z.cols(),
          ErrorKind::kInvalidArgument, "mlp_backward: upstream gradient shape mismatch");
  LayerGrads g;
  g.d_w1 = matmul_tn(cache.hidden, d_z);
  g.d_w0 = relu_mask_backward(matmul_nt(d_z, w1), cache.pre);
  return g;
}

DualEncoder::DualEncoder(EncoderSpec object_spec, EncoderSpec tag_spec,
                         std::shared_ptr<const SparseMatrix> object_adj,
                         std::shared_ptr<const SparseMatrix> tag_adj)
    : object_spec_(object_spec),
      tag_spec_(tag_spec),
      object_adj_(std::move(object_adj)),
      tag_adj_(std::move(tag_adj)) {
  for (const auto* s : {&object_spec_, &tag_spec_}) {
    require(s->input_dim > 0 && s->output_dim > 0 &&
                (s->kind == EncoderKind::kLookup || s->hidden_dim > 0),
            ErrorKind::kInvalidArgument, "EncoderSpec: dimensions must be positive");
  }
  require(object_spec_.output_dim == tag_spec_.output_dim, ErrorKind::kInvalidArgument,
          "object and tag encoders must share the output dimension");
  auto check_adj = [](const EncoderSpec& s, const SparseMatrix* a, const char* side) {
    if (s.kind != EncoderKind::kGcn) return;
    require(a != nullptr && a->rows() == s.input_dim && a->cols() == s.input_dim,
            ErrorKind::kInvalidArgument,
            std::string(side) + " gcn encoder needs a matching normalized adjacency");
  };
  check_adj(object_spec_, object_adj_.get(), "object");
  check_adj(tag_spec_, tag_adj_.get(), "tag");
}

void DualEncoder::check_params(const ModelParams& params) const {
  auto check = [](const EncoderSpec& s, const DenseMatrix& w0, const DenseMatrix& w1,
                  const char* side) {
    const bool lookup = s.kind == EncoderKind::kLookup;
    const std::size_t w0_cols = lookup ? s.output_dim : s.hidden_dim;
    bool ok = w0.rows() == s.input_dim && w0.cols() == w0_cols;
    ok = ok && (lookup ? w1.size() == 0 : (w1.rows() == s.hidden_dim && w1.cols() == s.output_dim));
    require(ok, ErrorKind::kInvalidArgument, std::string(side) + " encoder: parameter shape mismatch");
  };
  check(object_spec_, params.mats[kObjectW0], params.mats[kObjectW1], "object");
  check(tag_spec_, params.mats[kTagW0], params.mats[kTagW1], "tag");
}

EncoderCache DualEncoder::encode(const EncoderSpec& spec, const SparseMatrix* adj,
                                 const DenseMatrix& w0, const DenseMatrix& w1) const {
  switch (spec.kind) {
    case EncoderKind::kGcn: return gcn_forward(*adj, w0, w1);
    case EncoderKind::kMlp: return mlp_forward(w0, w1);
    case EncoderKind::kLookup: {
      EncoderCache c;
      c.z = w0;
      return c;
    }
  }
  fail(ErrorKind::kState, "unreachable encoder kind");
}

LayerGrads DualEncoder::encode_backward(const EncoderSpec& spec, const SparseMatrix* adj,
                                        const EncoderCache& cache, const DenseMatrix&,
                                        const DenseMatrix& w1, const DenseMatrix& d_z) const {
  switch (spec.kind) {
    case EncoderKind::kGcn: return gcn_backward(*adj, cache, w1, d_z);
    case EncoderKind::kMlp: return mlp_backward(cache, w1, d_z);
    case EncoderKind::kLookup: return {d_z, DenseMatrix()};
  }
  fail(ErrorKind::kState, "unreachable encoder kind");
}

DualForward DualEncoder::forward(const ModelParams& params) const {
  check_params(params);
  DualForward f;
  f.object = encode(object_spec_, object_adj_.get(), params.mats[kObjectW0], params.mats[kObjectW1]);
  f.tag = encode(tag_spec_, tag_adj_.get(), params.mats[kTagW0], params.mats[kTagW1]);
  f.generation = params.generation;
  return f;
}

ParamGrads DualEncoder::backward(const ModelParams& params, const DualForward& fwd,
                                 const DenseMatrix& d_z_object, const DenseMatrix& d_z_tag) const {
  require(fwd.generation == params.generation, ErrorKind::kState,
          "backward: forward cache is stale (parameters changed since forward)");
  auto og = encode_backward(object_spec_, object_adj_.get(), fwd.object, params.mats[kObjectW0],
                            params.mats[kObjectW1], d_z_object);
  auto tg = encode_backward(tag_spec_, tag_adj_.get(), fwd.tag, params.mats[kTagW0],
                            params.mats[kTagW1], d_z_tag);
  return {std::move(og.d_w0), std::move(og.d_w1), std::move(tg.d_w0), std::move(tg.d_w1)};
}

double score(const DenseMatrix& z_object, const DenseMatrix& z_tag, std::size_t object,
             std::size_t tag) {
  require(object < z_object.rows() && tag < z_tag.rows(), ErrorKind::kInvalidArgument,
          "score: index out of range");
  return dot(z_tag.row(tag), z_object.row(object));
}

std::vector<double> softmax_row(std::span<const double> scores) {
  std::vector<double> p(scores.begin(), scores.end());
  if (p.empty()) return p;
  const double m = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

namespace {

double noise_offset(double k, double pn) {
  require(k >= 1.0, ErrorKind::kInvalidArgument, "NCE: K must be >= 1");
  require(pn > 0.0 && pn <= 1.0, ErrorKind::kInvalidArgument, "NCE: noise probability must be in (0,1]");
  return std::log(k * pn);
}

}  // namespace

double nce_posterior(double s, double k, double pn) { return sigmoid(s - noise_offset(k, pn)); }

double nce_negative_prob(double s, double k, double pn) {
  return sigmoid(noise_offset(k, pn) - s);
}

DecoderLoss nce_loss_and_grads(std::span<const TrainingExample> batch, const DenseMatrix& z_object,
                               const DenseMatrix& z_tag, std::span<const double> noise,
                               double noise_k) {
  require(!batch.empty(), ErrorKind::kInvalidArgument, "nce_loss_and_grads: empty batch");
  require(noise.size() == z_tag.rows(), ErrorKind::kInvalidArgument,
          "nce_loss_and_grads: noise distribution size != tag count");
  DecoderLoss out;
  out.d_z_object = DenseMatrix(z_object.rows(), z_object.cols());
  out.d_z_tag = DenseMatrix(z_tag.rows(), z_tag.cols());
  const std::size_t d = z_object.cols();

  auto accumulate = [&](EntityId o, EntityId t, double g) {
    auto zo = z_object.row(o);
    auto zt = z_tag.row(t);
    auto go = out.d_z_object.row(o);
    auto gt = out.d_z_tag.row(t);
    for (std::size_t c = 0; c < d; ++c) {
      go[c] += g * zt[c];
      gt[c] += g * zo[c];
    }
  };

  for (const auto& ex : batch) {
    const double sp = score(z_object, z_tag, ex.object, ex.positive);
    const double bp = noise_offset(noise_k, noise[ex.positive]);
    // -log sigmoid(s - b) = softplus(b - s)
    out.loss += softplus(bp - sp);
    accumulate(ex.object, ex.positive, -sigmoid(bp - sp));
    for (EntityId neg : ex.negatives) {
      const double sn = score(z_object, z_tag, ex.object, neg);
      const double bn = noise_offset(noise_k, noise[neg]);
      // -log(1 - sigmoid(s - b)) = softplus(s - b)
      out.loss += softplus(sn - bn);
      accumulate(ex.object, neg, sigmoid(sn - bn));
    }
  }
  return out;
}

DecoderLoss mse_loss_and_grads(std::span<const TrainingExample> batch, const DenseMatrix& z_object,
                               const DenseMatrix& z_tag) {
  require(!batch.empty(), ErrorKind::kInvalidArgument, "mse_loss_and_grads: empty batch");
  DecoderLoss out;
  out.d_z_object = DenseMatrix(z_object.rows(), z_object.cols());
  out.d_z_tag = DenseMatrix(z_tag.rows(), z_tag.cols());
  const std::size_t d = z_object.cols();

  auto term = [&](EntityId o, EntityId t, double y) {
    const double r = score(z_object, z_tag, o, t) - y;
    out.loss += r * r;
    const double g = 2.0 * r;
    auto zo = z_object.row(o);
    auto zt = z_tag.row(t);
    auto go = out.d_z_object.row(o);
    auto gt = out.d_z_tag.row(t);
    for (std::size_t c = 0; c < d; ++c) {
      go[c] += g * zt[c];
      gt[c] += g * zo[c];
    }
  };

  for (const auto& ex : batch) {
    term(ex.object, ex.positive, 1.0);
    for (EntityId neg : ex.negatives) term(ex.object, neg, 0.0);
  }
  return out;
}

}  // namespace dge
