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

#ifndef SEQREC_SRC_NN_OPS_H_
#define SEQREC_SRC_NN_OPS_H_

#include <cmath>

#include "seqrec/models.h"
#include "seqrec/random.h"

namespace seqrec::internal {

inline constexpr double kLayerNormEps = 1e-6;

// Inverted dropout mask: entries are 0 or 1 / (1 - rate).
inline void DropoutMask(Eigen::Index rows, Eigen::Index cols, double rate,
                        Rng& rng, Matrix& mask) {
  mask.resize(rows, cols);
  const double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = UniformUnit(rng) < rate ? 0.0 : keep;
  }
}

// Row-wise layer norm. Keeps the normalized rows and reciprocal deviations
// for the backward pass.
inline void LayerNormForward(const Matrix& x, const Matrix& gain,
                             const Matrix& bias, Matrix& y, Matrix& x_hat,
                             Vector& rstd) {
  const Eigen::Index d = x.cols();
  x_hat.resize(x.rows(), d);
  rstd.resize(x.rows());
  y.resize(x.rows(), d);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).mean();
    x_hat.row(r) = x.row(r).array() - mean;
    const double var = x_hat.row(r).squaredNorm() / static_cast<double>(d);
    rstd(r) = 1.0 / std::sqrt(var + kLayerNormEps);
    x_hat.row(r) *= rstd(r);
    y.row(r) = x_hat.row(r).cwiseProduct(gain.row(0)) + bias.row(0);
  }
}

// Accumulates into dx, d_gain and d_bias.
inline void LayerNormBackward(const Matrix& dy, const Matrix& x_hat,
                              const Vector& rstd, const Matrix& gain,
                              Matrix& dx, Matrix& d_gain, Matrix& d_bias) {
  const double d = static_cast<double>(dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    d_gain.row(0) += dy.row(r).cwiseProduct(x_hat.row(r));
    d_bias.row(0) += dy.row(r);
    RowVector dx_hat = dy.row(r).cwiseProduct(gain.row(0));
    const double mean_dx_hat = dx_hat.sum() / d;
    const double mean_dot = dx_hat.dot(x_hat.row(r)) / d;
    dx.row(r).array() += rstd(r) * (dx_hat.array() - mean_dx_hat -
                                    x_hat.row(r).array() * mean_dot);
  }
}

inline double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace seqrec::internal

#endif  // SEQREC_SRC_NN_OPS_H_
