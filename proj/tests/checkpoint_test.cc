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


#include "seqrec/checkpoint.h"

#include <cstring>

#include "doctest.h"
#include "seqrec/error.h"
#include "test_util.h"

namespace seqrec {
namespace {

using testing::TempDir;

TEST_CASE("container layout") {
  Checkpoint c;
  c.header["kind"] = "popularity";
  c.names = {"w"};
  c.blocks = {Matrix::Constant(1, 2, 1.5)};
  const std::string bytes = SerializeCheckpoint(c);
  CHECK(bytes.substr(0, 8) == "SEQRECK1");
  uint64_t len = 0;
  for (int b = 7; b >= 0; --b) len = (len << 8) | static_cast<unsigned char>(bytes[8 + b]);
  CHECK(bytes.size() == 16 + len + 2 * 8);
  const Json header = Json::parse(bytes.substr(16, len));
  CHECK(header["blocks"][0]["name"] == "w");
  CHECK(header["blocks"][0]["shape"] == Json::array({1, 2}));
  // 1.5 little-endian: 00 .. 00 f8 3f.
  CHECK(static_cast<unsigned char>(bytes[16 + len + 6]) == 0xf8);
  CHECK(static_cast<unsigned char>(bytes[16 + len + 7]) == 0x3f);
}

TEST_CASE("model round trip is bit exact") {
  for (EncoderKind kind : {EncoderKind::kCausalSelfAttention, EncoderKind::kRecurrent,
                           EncoderKind::kConvolutional}) {
    EncoderConfig e;
    e.kind = kind;
    e.dim = 8;
    e.max_len = 10;
    e.use_bias = kind == EncoderKind::kRecurrent;
    const ModelParams p = InitParameters(25, e, 3);
    TempDir dir;
    WriteCheckpoint(dir / "m.bin", ToCheckpoint(p, 99));
    const Checkpoint c = ReadCheckpoint(dir / "m.bin");
    CHECK(c.header["config_hash"] == 99);
    const ModelParams q = ModelFromCheckpoint(c);
    CHECK(q.config == p.config);
    CHECK(q.catalog_size == 25);
    CHECK(q.names == p.names);
    REQUIRE(q.blocks.size() == p.blocks.size());
    for (size_t b = 0; b < p.blocks.size(); ++b) CHECK(q.blocks[b] == p.blocks[b]);
    std::vector<ItemIndex> input = {3, 1, 4, 1, 5};
    CHECK(ScoreCatalog(q, EncodeSequence(q, input)) == ScoreCatalog(p, EncodeSequence(p, input)));
  }
}

TEST_CASE("baseline round trips") {
  const std::vector<double> counts = {3, 0, 7.5};
  CHECK(PopularityFromCheckpoint(DeserializeCheckpoint(
            SerializeCheckpoint(PopularityCheckpoint(counts)))) == counts);
  const MfBprModel m = InitMfBpr(4, 6, 3, 0.1, 2);
  const MfBprModel back =
      MfBprFromCheckpoint(DeserializeCheckpoint(SerializeCheckpoint(MfBprCheckpoint(m))));
  CHECK(back.user_embeddings == m.user_embeddings);
  CHECK(back.item_embeddings == m.item_embeddings);
  CHECK_THROWS_AS(MfBprFromCheckpoint(PopularityCheckpoint(counts)), Error);
}

TEST_CASE("damaged files are data errors") {
  const ModelParams p = InitParameters(10, EncoderConfig{}, 1);
  const std::string good = SerializeCheckpoint(ToCheckpoint(p));
  auto kind_of = [](const std::string& bytes) {
    try {
      DeserializeCheckpoint(bytes);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kRuntime;
  };
  CHECK(kind_of(good.substr(0, good.size() - 3)) == ErrorKind::kData);
  CHECK(kind_of(good + "x") == ErrorKind::kData);
  CHECK(kind_of("NOTACKPT" + good.substr(8)) == ErrorKind::kData);
  CHECK(kind_of(good.substr(0, 20)) == ErrorKind::kData);
  CHECK_THROWS_AS(ReadCheckpoint("/nonexistent/ckpt.bin"), Error);

  Checkpoint c = ToCheckpoint(p);
  c.blocks[1] = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(ModelFromCheckpoint(DeserializeCheckpoint(SerializeCheckpoint(c))), Error);
}

}  // namespace
}  // namespace seqrec
