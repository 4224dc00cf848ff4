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


#include "seqrec/optimizer.h"

#include <cmath>
#include <limits>

#include "doctest.h"
#include "seqrec/error.h"
#include "test_util.h"

namespace seqrec {
namespace {

Matrix Scalar(double x) { return Matrix::Constant(1, 1, x); }

// Textbook scalar Adam.
struct ScalarAdam {
  double m = 0.0, v = 0.0;
  int t = 0;
  double Step(double x, double g, const AdamConfig& c) {
    ++t;
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g * g;
    const double mhat = m / (1.0 - std::pow(c.beta1, t));
    const double vhat = v / (1.0 - std::pow(c.beta2, t));
    return x - c.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
  }
};

TEST_CASE("zero gradients leave parameters unchanged") {
  std::vector<Matrix> params = {Matrix::Constant(2, 3, 0.7), Scalar(-1.0)};
  const auto before = params;
  Adam adam(AdamConfig{}, params);
  std::vector<Matrix> zero = {Matrix::Zero(2, 3), Scalar(0.0)};
  adam.Step(params, zero, {"a", "b"});
  adam.Step(params, zero, {"a", "b"});
  CHECK(adam.step() == 2);
  CHECK(params[0] == before[0]);
  CHECK(params[1] == before[1]);
}

TEST_CASE("first step moves by the learning rate") {
  AdamConfig c;
  for (double g : {0.3, -2.0, 1e-3}) {
    std::vector<Matrix> p = {Scalar(1.0)};
    Adam adam(c, p);
    adam.Step(p, {Scalar(g)}, {"w"});
    const double expected = 1.0 - c.learning_rate * g / (std::abs(g) + c.epsilon);
    CHECK(p[0](0, 0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(adam.first_moments()[0](0, 0) == doctest::Approx((1.0 - c.beta1) * g));
    CHECK(adam.second_moments()[0](0, 0) == doctest::Approx((1.0 - c.beta2) * g * g));
  }
}

TEST_CASE("constant gradient reaches a learning-rate sized step") {
  AdamConfig c;
  std::vector<Matrix> p = {Scalar(0.0)};
  Adam adam(c, p);
  double previous = 0.0, step = 0.0;
  for (int t = 0; t < 2000; ++t) {
    previous = p[0](0, 0);
    adam.Step(p, {Scalar(0.25)}, {"w"});
    step = previous - p[0](0, 0);
  }
  CHECK(step == doctest::Approx(c.learning_rate).epsilon(1e-6));
}

TEST_CASE("matches a scalar reference on random gradients") {
  AdamConfig c;
  c.learning_rate = 0.01;
  Rng rng(3);
  std::vector<Matrix> p = {Matrix::Zero(1, 4)};
  Adam adam(c, p);
  ScalarAdam ref[4];
  double x[4] = {0, 0, 0, 0};
  for (int t = 0; t < 200; ++t) {
    Matrix g(1, 4);
    for (int i = 0; i < 4; ++i) {
      g(0, i) = 2.0 * UniformUnit(rng) - 1.0;
      x[i] = ref[i].Step(x[i], g(0, i), c);
    }
    adam.Step(p, {g}, {"w"});
  }
  for (int i = 0; i < 4; ++i) CHECK(p[0](0, i) == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("global norm clipping") {
  AdamConfig c;
  c.clip_norm = 1.0;
  std::vector<Matrix> p = {Matrix::Zero(1, 2), Scalar(0.0)};
  Adam adam(c, p);
  Matrix g(1, 2);
  g << 3.0, 0.0;
  adam.Step(p, {g, Scalar(4.0)}, {"a", "b"});
  CHECK(adam.first_moments()[0](0, 0) == doctest::Approx(0.1 * 0.6));
  CHECK(adam.first_moments()[1](0, 0) == doctest::Approx(0.1 * 0.8));
}

TEST_CASE("non-finite gradients are rejected by name") {
  std::vector<Matrix> p = {Scalar(1.0), Scalar(2.0)};
  Adam adam(AdamConfig{}, p);
  try {
    adam.Step(p, {Scalar(0.5), Scalar(std::numeric_limits<double>::quiet_NaN())},
              {"first", "second"});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("second") != std::string::npos);
  }
  CHECK(p[0](0, 0) == 1.0);
  CHECK(p[1](0, 0) == 2.0);
  CHECK(adam.step() == 0);
  AdamConfig bad;
  bad.beta2 = 1.0;
  CHECK_THROWS_AS(Validate(bad), Error);
}

}  // namespace
}  // namespace seqrec
