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

// Convolutional encoder in the basic Caser form: the last `max_len` item
// embeddings (left-padded with zero rows) form an image; horizontal filters of
// several heights are max-pooled over time, vertical filters take weighted
// sums over positions, and a linear layer maps the concatenation to `dim`.

#include <string>

#include "encoders.h"
#include "nn_ops.h"

namespace seqrec::internal {

namespace {

using StridedWindows =
    Eigen::Map<const Matrix, Eigen::Unaligned, Eigen::OuterStride<>>;

struct ConvCache : Encoder::Cache {
  std::vector<ItemIndex> items;
  Eigen::Index offset = 0;
  Matrix m0;
  Matrix x;                                  // max_len x d image
  std::vector<Matrix> pre;                   // per height, windows x filters
  std::vector<std::vector<Eigen::Index>> argmax;
  Matrix z, mz;                              // 1 x feature_dim
};

class ConvolutionalEncoder final : public Encoder {
 public:
  ConvolutionalEncoder(const EncoderConfig& config, size_t first_block)
      : Encoder(config, first_block) {}

  std::vector<ParamSpec> Layout() const override {
    const Eigen::Index d = config_.dim;
    const Eigen::Index nh = config_.conv_horizontal_filters;
    std::vector<ParamSpec> specs;
    for (int h : config_.conv_heights) {
      const std::string p = "conv.h" + std::to_string(h);
      specs.push_back({p + ".w", nh, h * d, InitKind::kNormal});
      specs.push_back({p + ".b", 1, nh, InitKind::kZeros});
    }
    specs.push_back({"conv.vertical", config_.conv_vertical_filters,
                     config_.max_len, InitKind::kNormal});
    specs.push_back({"conv.fc.w", FeatureDim(), d, InitKind::kNormal});
    specs.push_back({"conv.fc.b", 1, d, InitKind::kZeros});
    return specs;
  }

  std::unique_ptr<Cache> NewCache() const override {
    return std::make_unique<ConvCache>();
  }

  void Forward(const ModelParams& params, std::span<const ItemIndex> input,
               Cache& base_cache, Rng* dropout_rng, Vector& out) const override {
    auto& c = static_cast<ConvCache&>(base_cache);
    const auto& p = params.blocks;
    const Eigen::Index d = config_.dim;
    const Eigen::Index len_max = config_.max_len;
    const auto len = static_cast<Eigen::Index>(input.size());
    const Eigen::Index nv = config_.conv_vertical_filters;
    const Eigen::Index nh = config_.conv_horizontal_filters;
    const bool dropout = dropout_rng != nullptr && config_.dropout > 0.0;

    c.items.assign(input.begin(), input.end());
    c.offset = len_max - len;
    c.x = Matrix::Zero(len_max, d);
    for (Eigen::Index t = 0; t < len; ++t) {
      c.x.row(c.offset + t) = params.item_embeddings().row(input[t]);
    }
    if (dropout) {
      DropoutMask(len_max, d, config_.dropout, *dropout_rng, c.m0);
      c.x.array() *= c.m0.array();
    } else {
      c.m0.resize(0, 0);
    }

    c.z.resize(1, FeatureDim());
    Matrix vertical = p[VerticalIndex()] * c.x;  // nv x d
    c.z.leftCols(nv * d) = Eigen::Map<const RowVector>(vertical.data(), nv * d);

    const size_t heights = config_.conv_heights.size();
    c.pre.resize(heights);
    c.argmax.resize(heights);
    for (size_t hi = 0; hi < heights; ++hi) {
      const Eigen::Index h = config_.conv_heights[hi];
      const Eigen::Index windows = len_max - h + 1;
      StridedWindows win(c.x.data(), windows, h * d, Eigen::OuterStride<>(d));
      c.pre[hi] = (win * p[HeightIndex(hi)].transpose()).rowwise() +
                  p[HeightIndex(hi) + 1].row(0);
      c.argmax[hi].resize(nh);
      for (Eigen::Index f = 0; f < nh; ++f) {
        Eigen::Index best = 0;
        const double m = c.pre[hi].col(f).maxCoeff(&best);
        c.argmax[hi][f] = best;
        c.z(0, nv * d + static_cast<Eigen::Index>(hi) * nh + f) = std::max(m, 0.0);
      }
    }
    if (dropout) {
      DropoutMask(1, FeatureDim(), config_.dropout, *dropout_rng, c.mz);
      c.z.array() *= c.mz.array();
    } else {
      c.mz.resize(0, 0);
    }
    out = ((c.z * p[FcIndex()]) + p[FcIndex() + 1]).transpose();
  }

  void Backward(const ModelParams& params, const Cache& base_cache,
                const Vector& d_out, std::vector<Matrix>& g) const override {
    const auto& c = static_cast<const ConvCache&>(base_cache);
    const auto& p = params.blocks;
    const Eigen::Index d = config_.dim;
    const Eigen::Index nv = config_.conv_vertical_filters;
    const Eigen::Index nh = config_.conv_horizontal_filters;

    g[FcIndex()].noalias() += c.z.transpose() * d_out.transpose();
    g[FcIndex() + 1] += d_out.transpose();
    Matrix dz = d_out.transpose() * p[FcIndex()].transpose();
    if (c.mz.size() > 0) dz.array() *= c.mz.array();

    Eigen::Map<const Matrix> d_vertical(dz.data(), nv, d);
    g[VerticalIndex()].noalias() += d_vertical * c.x.transpose();
    Matrix dx = p[VerticalIndex()].transpose() * d_vertical;

    for (size_t hi = 0; hi < config_.conv_heights.size(); ++hi) {
      const Eigen::Index h = config_.conv_heights[hi];
      const Matrix& w = p[HeightIndex(hi)];
      for (Eigen::Index f = 0; f < nh; ++f) {
        const Eigen::Index s = c.argmax[hi][f];
        if (c.pre[hi](s, f) <= 0.0) continue;
        const double grad = dz(0, nv * d + static_cast<Eigen::Index>(hi) * nh + f);
        Eigen::Map<const RowVector> window(c.x.data() + s * d, h * d);
        g[HeightIndex(hi)].row(f) += grad * window;
        g[HeightIndex(hi) + 1](0, f) += grad;
        Eigen::Map<RowVector> d_window(dx.data() + s * d, h * d);
        d_window += grad * w.row(f);
      }
    }
    if (c.m0.size() > 0) dx.array() *= c.m0.array();
    for (size_t t = 0; t < c.items.size(); ++t) {
      g[0].row(c.items[t]) += dx.row(c.offset + static_cast<Eigen::Index>(t));
    }
  }

 private:
  Eigen::Index FeatureDim() const {
    return static_cast<Eigen::Index>(config_.conv_vertical_filters) * config_.dim +
           static_cast<Eigen::Index>(config_.conv_horizontal_filters) *
               static_cast<Eigen::Index>(config_.conv_heights.size());
  }
  size_t HeightIndex(size_t hi) const { return first_block_ + 2 * hi; }
  size_t VerticalIndex() const {
    return first_block_ + 2 * config_.conv_heights.size();
  }
  size_t FcIndex() const { return VerticalIndex() + 1; }
};

}  // namespace

std::unique_ptr<Encoder> MakeConvolutionalEncoder(const EncoderConfig& config,
                                                  size_t first_block) {
  return std::make_unique<ConvolutionalEncoder>(config, first_block);
}

}  // namespace seqrec::internal
