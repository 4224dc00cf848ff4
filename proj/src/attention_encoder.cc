// Copyright 2026 The seqrec Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Causal self-attention encoder: learned positions, pre-norm blocks of
// single- or multi-head attention plus a ReLU feed-forward layer, and a final
// layer norm. Only the last position's output is produced, so the last block
// computes queries and the feed-forward layer for that row alone.

#include <cmath>
#include <limits>

#include "encoders.h"
#include "nn_ops.h"

namespace seqrec::internal {

namespace {

enum BlockParam {
  kLn1Gain, kLn1Bias, kWq, kBq, kWk, kBk, kWv, kBv, kWo, kBo,
  kLn2Gain, kLn2Bias, kW1, kB1, kW2, kB2, kNumBlockParams
};

struct BlockCache {
  Eigen::Index q0 = 0;
  Matrix a_hat, a;
  Vector a_rstd;
  Matrix q, k, v;
  std::vector<Matrix> probs;
  Matrix o, m1;
  Matrix b_hat, b;
  Vector b_rstd;
  Matrix f1, r, m2;
};

struct AttentionCache : Encoder::Cache {
  std::vector<ItemIndex> items;
  Eigen::Index offset = 0;
  Matrix m0;
  std::vector<BlockCache> blocks;
  Matrix final_hat;
  Vector final_rstd;
};

class AttentionEncoder final : public Encoder {
 public:
  AttentionEncoder(const EncoderConfig& config, size_t first_block)
      : Encoder(config, first_block),
        ffn_(config.ffn_dim > 0 ? config.ffn_dim : config.dim) {}

  std::vector<ParamSpec> Layout() const override {
    const Eigen::Index d = config_.dim;
    std::vector<ParamSpec> specs;
    specs.push_back({"pos_embeddings", config_.max_len, d, InitKind::kNormal});
    for (int b = 0; b < config_.num_blocks; ++b) {
      const std::string p = "block" + std::to_string(b) + ".";
      specs.push_back({p + "ln1.gain", 1, d, InitKind::kOnes});
      specs.push_back({p + "ln1.bias", 1, d, InitKind::kZeros});
      for (const char* w : {"q", "k", "v", "o"}) {
        specs.push_back({p + "attn.w" + w, d, d, InitKind::kNormal});
        specs.push_back({p + "attn.b" + w, 1, d, InitKind::kZeros});
      }
      specs.push_back({p + "ln2.gain", 1, d, InitKind::kOnes});
      specs.push_back({p + "ln2.bias", 1, d, InitKind::kZeros});
      specs.push_back({p + "ffn.w1", d, ffn_, InitKind::kNormal});
      specs.push_back({p + "ffn.b1", 1, ffn_, InitKind::kZeros});
      specs.push_back({p + "ffn.w2", ffn_, d, InitKind::kNormal});
      specs.push_back({p + "ffn.b2", 1, d, InitKind::kZeros});
    }
    specs.push_back({"final_ln.gain", 1, d, InitKind::kOnes});
    specs.push_back({"final_ln.bias", 1, d, InitKind::kZeros});
    return specs;
  }

  std::unique_ptr<Cache> NewCache() const override {
    return std::make_unique<AttentionCache>();
  }

  void Forward(const ModelParams& params, std::span<const ItemIndex> input,
               Cache& base_cache, Rng* dropout_rng, Vector& out) const override {
    auto& cache = static_cast<AttentionCache&>(base_cache);
    const auto len = static_cast<Eigen::Index>(input.size());
    const Eigen::Index d = config_.dim;
    const Matrix& emb = params.item_embeddings();
    const Matrix& pos = params.blocks[PosIndex()];
    cache.items.assign(input.begin(), input.end());
    cache.offset = config_.max_len - len;

    Matrix x(len, d);
    for (Eigen::Index t = 0; t < len; ++t) {
      x.row(t) = emb.row(input[t]) + pos.row(cache.offset + t);
    }
    const bool dropout = dropout_rng != nullptr && config_.dropout > 0.0;
    if (dropout) {
      DropoutMask(len, d, config_.dropout, *dropout_rng, cache.m0);
      x.array() *= cache.m0.array();
    } else {
      cache.m0.resize(0, 0);
    }

    cache.blocks.resize(config_.num_blocks);
    for (int b = 0; b < config_.num_blocks; ++b) {
      const Eigen::Index q0 = b + 1 == config_.num_blocks ? len - 1 : 0;
      x = BlockForward(params, b, x, q0, cache.blocks[b],
                       dropout ? dropout_rng : nullptr);
    }
    Matrix y;
    LayerNormForward(x, params.blocks[FinalIndex()], params.blocks[FinalIndex() + 1],
                     y, cache.final_hat, cache.final_rstd);
    out = y.row(0).transpose();
  }

  void Backward(const ModelParams& params, const Cache& base_cache,
                const Vector& d_out, std::vector<Matrix>& grads) const override {
    const auto& cache = static_cast<const AttentionCache&>(base_cache);
    const Eigen::Index d = config_.dim;
    Matrix dy = d_out.transpose();
    Matrix dx = Matrix::Zero(1, d);
    LayerNormBackward(dy, cache.final_hat, cache.final_rstd,
                      params.blocks[FinalIndex()], dx, grads[FinalIndex()],
                      grads[FinalIndex() + 1]);
    for (int b = config_.num_blocks - 1; b >= 0; --b) {
      dx = BlockBackward(params, b, cache.blocks[b], dx, grads);
    }
    if (cache.m0.size() > 0) dx.array() *= cache.m0.array();
    Matrix& g_emb = grads[0];
    Matrix& g_pos = grads[PosIndex()];
    for (Eigen::Index t = 0; t < dx.rows(); ++t) {
      g_emb.row(cache.items[t]) += dx.row(t);
      g_pos.row(cache.offset + t) += dx.row(t);
    }
  }

 private:
  size_t PosIndex() const { return first_block_; }
  size_t BlockBase(int b) const {
    return first_block_ + 1 + static_cast<size_t>(b) * kNumBlockParams;
  }
  size_t FinalIndex() const { return BlockBase(config_.num_blocks); }

  // `x` holds every position; returns the rows [q0, len).
  Matrix BlockForward(const ModelParams& params, int block, const Matrix& x,
                      Eigen::Index q0, BlockCache& c, Rng* dropout_rng) const {
    const auto& p = params.blocks;
    const size_t base = BlockBase(block);
    const Eigen::Index len = x.rows();
    const Eigen::Index lq = len - q0;
    const Eigen::Index heads = config_.num_heads;
    const Eigen::Index dh = config_.dim / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    c.q0 = q0;

    LayerNormForward(x, p[base + kLn1Gain], p[base + kLn1Bias], c.a, c.a_hat,
                     c.a_rstd);
    c.q = (c.a.bottomRows(lq) * p[base + kWq]).rowwise() + p[base + kBq].row(0);
    c.k = (c.a * p[base + kWk]).rowwise() + p[base + kBk].row(0);
    c.v = (c.a * p[base + kWv]).rowwise() + p[base + kBv].row(0);

    c.probs.resize(heads);
    c.o.resize(lq, config_.dim);
    for (Eigen::Index h = 0; h < heads; ++h) {
      Matrix& prob = c.probs[h];
      prob.noalias() = c.q.middleCols(h * dh, dh) *
                       c.k.middleCols(h * dh, dh).transpose();
      for (Eigen::Index r = 0; r < lq; ++r) {
        const Eigen::Index visible = q0 + r + 1;
        auto row = prob.row(r);
        row.head(visible) *= scale;
        const double max = row.head(visible).maxCoeff();
        row.head(visible) = (row.head(visible).array() - max).exp();
        row.head(visible) /= row.head(visible).sum();
        row.tail(len - visible).setZero();
      }
      c.o.middleCols(h * dh, dh).noalias() = prob * c.v.middleCols(h * dh, dh);
    }
    Matrix attn = (c.o * p[base + kWo]).rowwise() + p[base + kBo].row(0);
    if (dropout_rng != nullptr) {
      DropoutMask(lq, config_.dim, config_.dropout, *dropout_rng, c.m1);
      attn.array() *= c.m1.array();
    } else {
      c.m1.resize(0, 0);
    }
    Matrix x1 = x.bottomRows(lq) + attn;

    LayerNormForward(x1, p[base + kLn2Gain], p[base + kLn2Bias], c.b, c.b_hat,
                     c.b_rstd);
    c.f1 = (c.b * p[base + kW1]).rowwise() + p[base + kB1].row(0);
    c.r = c.f1.cwiseMax(0.0);
    Matrix f2 = (c.r * p[base + kW2]).rowwise() + p[base + kB2].row(0);
    if (dropout_rng != nullptr) {
      DropoutMask(lq, config_.dim, config_.dropout, *dropout_rng, c.m2);
      f2.array() *= c.m2.array();
    } else {
      c.m2.resize(0, 0);
    }
    return x1 + f2;
  }

  // Takes d(loss)/d(block output rows) and returns d(loss)/d(block input).
  Matrix BlockBackward(const ModelParams& params, int block, const BlockCache& c,
                       const Matrix& dy, std::vector<Matrix>& g) const {
    const auto& p = params.blocks;
    const size_t base = BlockBase(block);
    const Eigen::Index len = c.a.rows();
    const Eigen::Index lq = len - c.q0;
    const Eigen::Index heads = config_.num_heads;
    const Eigen::Index dh = config_.dim / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    // Feed-forward branch.
    Matrix d_f2 = dy;
    if (c.m2.size() > 0) d_f2.array() *= c.m2.array();
    g[base + kW2].noalias() += c.r.transpose() * d_f2;
    g[base + kB2] += d_f2.colwise().sum();
    Matrix d_f1 = (d_f2 * p[base + kW2].transpose()).array() *
                  (c.f1.array() > 0.0).cast<double>();
    g[base + kW1].noalias() += c.b.transpose() * d_f1;
    g[base + kB1] += d_f1.colwise().sum();
    Matrix d_b = d_f1 * p[base + kW1].transpose();
    Matrix d_x1 = dy;
    LayerNormBackward(d_b, c.b_hat, c.b_rstd, p[base + kLn2Gain], d_x1,
                      g[base + kLn2Gain], g[base + kLn2Bias]);

    // Attention branch.
    Matrix d_attn = d_x1;
    if (c.m1.size() > 0) d_attn.array() *= c.m1.array();
    g[base + kWo].noalias() += c.o.transpose() * d_attn;
    g[base + kBo] += d_attn.colwise().sum();
    Matrix d_o = d_attn * p[base + kWo].transpose();

    Matrix d_q(lq, config_.dim), d_k(len, config_.dim), d_v(len, config_.dim);
    for (Eigen::Index h = 0; h < heads; ++h) {
      const Matrix& prob = c.probs[h];
      auto d_o_h = d_o.middleCols(h * dh, dh);
      Matrix d_prob = d_o_h * c.v.middleCols(h * dh, dh).transpose();
      d_v.middleCols(h * dh, dh).noalias() = prob.transpose() * d_o_h;
      Vector row_dot = (d_prob.array() * prob.array()).rowwise().sum();
      Matrix d_s = prob.array() * (d_prob.colwise() - row_dot).array();
      d_s *= scale;
      d_q.middleCols(h * dh, dh).noalias() = d_s * c.k.middleCols(h * dh, dh);
      d_k.middleCols(h * dh, dh).noalias() =
          d_s.transpose() * c.q.middleCols(h * dh, dh);
    }

    Matrix d_a = Matrix::Zero(len, config_.dim);
    g[base + kWq].noalias() += c.a.bottomRows(lq).transpose() * d_q;
    g[base + kBq] += d_q.colwise().sum();
    d_a.bottomRows(lq).noalias() += d_q * p[base + kWq].transpose();
    g[base + kWk].noalias() += c.a.transpose() * d_k;
    g[base + kBk] += d_k.colwise().sum();
    d_a.noalias() += d_k * p[base + kWk].transpose();
    g[base + kWv].noalias() += c.a.transpose() * d_v;
    g[base + kBv] += d_v.colwise().sum();
    d_a.noalias() += d_v * p[base + kWv].transpose();

    Matrix dx = Matrix::Zero(len, config_.dim);
    dx.bottomRows(lq) = d_x1;
    LayerNormBackward(d_a, c.a_hat, c.a_rstd, p[base + kLn1Gain], dx,
                      g[base + kLn1Gain], g[base + kLn1Bias]);
    return dx;
  }

  const int ffn_;
};

}  // namespace

std::unique_ptr<Encoder> MakeAttentionEncoder(const EncoderConfig& config,
                                              size_t first_block) {
  return std::make_unique<AttentionEncoder>(config, first_block);
}

}  // namespace seqrec::internal
