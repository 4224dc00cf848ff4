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

// Single-layer GRU over the input items; the final hidden state is the
// sequence embedding. Hidden size equals the embedding size.

#include "encoders.h"
#include "nn_ops.h"

namespace seqrec::internal {

namespace {

enum GruParam { kWz, kWr, kWn, kUz, kUr, kUn, kBz, kBr, kBn, kNumGruParams };

struct RecurrentCache : Encoder::Cache {
  std::vector<ItemIndex> items;
  Matrix m0;
  Matrix x;       // inputs, len x d
  Matrix h;       // states, (len + 1) x d, row 0 is the zero state
  Matrix z, r, n;
  Matrix hu;      // h_{t-1} * Un
};

class RecurrentEncoder final : public Encoder {
 public:
  RecurrentEncoder(const EncoderConfig& config, size_t first_block)
      : Encoder(config, first_block) {}

  std::vector<ParamSpec> Layout() const override {
    const Eigen::Index d = config_.dim;
    return {
        {"gru.wz", d, d, InitKind::kNormal}, {"gru.wr", d, d, InitKind::kNormal},
        {"gru.wn", d, d, InitKind::kNormal}, {"gru.uz", d, d, InitKind::kNormal},
        {"gru.ur", d, d, InitKind::kNormal}, {"gru.un", d, d, InitKind::kNormal},
        {"gru.bz", 1, d, InitKind::kZeros},  {"gru.br", 1, d, InitKind::kZeros},
        {"gru.bn", 1, d, InitKind::kZeros},
    };
  }

  std::unique_ptr<Cache> NewCache() const override {
    return std::make_unique<RecurrentCache>();
  }

  void Forward(const ModelParams& params, std::span<const ItemIndex> input,
               Cache& base_cache, Rng* dropout_rng, Vector& out) const override {
    auto& c = static_cast<RecurrentCache&>(base_cache);
    const auto& p = params.blocks;
    const size_t b = first_block_;
    const auto len = static_cast<Eigen::Index>(input.size());
    const Eigen::Index d = config_.dim;
    c.items.assign(input.begin(), input.end());
    c.x.resize(len, d);
    for (Eigen::Index t = 0; t < len; ++t) {
      c.x.row(t) = params.item_embeddings().row(input[t]);
    }
    if (dropout_rng != nullptr && config_.dropout > 0.0) {
      DropoutMask(len, d, config_.dropout, *dropout_rng, c.m0);
      c.x.array() *= c.m0.array();
    } else {
      c.m0.resize(0, 0);
    }
    // Input projections for every step at once.
    Matrix xz = (c.x * p[b + kWz]).rowwise() + p[b + kBz].row(0);
    Matrix xr = (c.x * p[b + kWr]).rowwise() + p[b + kBr].row(0);
    Matrix xn = (c.x * p[b + kWn]).rowwise() + p[b + kBn].row(0);

    c.h = Matrix::Zero(len + 1, d);
    c.z.resize(len, d);
    c.r.resize(len, d);
    c.n.resize(len, d);
    c.hu.resize(len, d);
    for (Eigen::Index t = 0; t < len; ++t) {
      auto h_prev = c.h.row(t);
      c.z.row(t) = (xz.row(t) + h_prev * p[b + kUz])
                       .unaryExpr([](double v) { return Sigmoid(v); });
      c.r.row(t) = (xr.row(t) + h_prev * p[b + kUr])
                       .unaryExpr([](double v) { return Sigmoid(v); });
      c.hu.row(t) = h_prev * p[b + kUn];
      c.n.row(t) = (xn.row(t).array() + c.r.row(t).array() * c.hu.row(t).array())
                       .tanh();
      c.h.row(t + 1) = (1.0 - c.z.row(t).array()) * c.n.row(t).array() +
                       c.z.row(t).array() * h_prev.array();
    }
    out = c.h.row(len).transpose();
  }

  void Backward(const ModelParams& params, const Cache& base_cache,
                const Vector& d_out, std::vector<Matrix>& g) const override {
    const auto& c = static_cast<const RecurrentCache&>(base_cache);
    const auto& p = params.blocks;
    const size_t b = first_block_;
    const Eigen::Index len = c.x.rows();
    const Eigen::Index d = config_.dim;

    Matrix dz_pre(len, d), dr_pre(len, d), dn_pre(len, d), dhu(len, d);
    RowVector dh = d_out.transpose();
    for (Eigen::Index t = len - 1; t >= 0; --t) {
      const auto h_prev = c.h.row(t).array();
      const auto z = c.z.row(t).array();
      const auto r = c.r.row(t).array();
      const auto n = c.n.row(t).array();
      RowVector dn = dh.array() * (1.0 - z);
      RowVector dz = dh.array() * (h_prev - n);
      RowVector dh_prev = dh.array() * z;
      dn_pre.row(t) = dn.array() * (1.0 - n * n);
      dhu.row(t) = dn_pre.row(t).array() * r;
      RowVector dr = dn_pre.row(t).array() * c.hu.row(t).array();
      dz_pre.row(t) = dz.array() * z * (1.0 - z);
      dr_pre.row(t) = dr.array() * r * (1.0 - r);
      dh_prev.noalias() += dhu.row(t) * p[b + kUn].transpose();
      dh_prev.noalias() += dz_pre.row(t) * p[b + kUz].transpose();
      dh_prev.noalias() += dr_pre.row(t) * p[b + kUr].transpose();
      dh = dh_prev;
    }
    const auto h_prev_all = c.h.topRows(len);
    g[b + kWz].noalias() += c.x.transpose() * dz_pre;
    g[b + kWr].noalias() += c.x.transpose() * dr_pre;
    g[b + kWn].noalias() += c.x.transpose() * dn_pre;
    g[b + kUz].noalias() += h_prev_all.transpose() * dz_pre;
    g[b + kUr].noalias() += h_prev_all.transpose() * dr_pre;
    g[b + kUn].noalias() += h_prev_all.transpose() * dhu;
    g[b + kBz] += dz_pre.colwise().sum();
    g[b + kBr] += dr_pre.colwise().sum();
    g[b + kBn] += dn_pre.colwise().sum();

    Matrix dx = dz_pre * p[b + kWz].transpose();
    dx.noalias() += dr_pre * p[b + kWr].transpose();
    dx.noalias() += dn_pre * p[b + kWn].transpose();
    if (c.m0.size() > 0) dx.array() *= c.m0.array();
    for (Eigen::Index t = 0; t < len; ++t) g[0].row(c.items[t]) += dx.row(t);
  }
};

}  // namespace

std::unique_ptr<Encoder> MakeRecurrentEncoder(const EncoderConfig& config,
                                              size_t first_block) {
  return std::make_unique<RecurrentEncoder>(config, first_block);
}

}  // namespace seqrec::internal
