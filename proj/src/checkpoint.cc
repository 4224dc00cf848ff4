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

#include <bit>
#include <cstring>

#include "seqrec/error.h"
#include "seqrec/io.h"

namespace seqrec {
namespace {

constexpr char kMagic[8] = {'S', 'E', 'Q', 'R', 'E', 'C', 'K', '1'};

void AppendU64(std::string& out, uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

uint64_t ReadU64(const char* p) {
  uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | static_cast<unsigned char>(p[b]);
  return v;
}

void AppendDouble(std::string& out, double x) { AppendU64(out, std::bit_cast<uint64_t>(x)); }

size_t CheckedCount(const Json& shape) {
  if (!shape.is_array() || shape.size() != 2 || !shape[0].is_number_unsigned() ||
      !shape[1].is_number_unsigned()) {
    throw DataError("checkpoint block shape is malformed");
  }
  return shape[0].get<size_t>() * shape[1].get<size_t>();
}

const Json& Field(const Json& header, const char* key) {
  auto it = header.find(key);
  if (it == header.end()) {
    throw DataError(std::string("checkpoint header lacks '") + key + "'");
  }
  return *it;
}

std::string Kind(const Checkpoint& c) {
  const Json& k = Field(c.header, "kind");
  if (!k.is_string()) throw DataError("checkpoint kind is not a string");
  return k.get<std::string>();
}

const Matrix& Block(const Checkpoint& c, const std::string& name) {
  for (size_t b = 0; b < c.names.size(); ++b) {
    if (c.names[b] == name) return c.blocks[b];
  }
  throw DataError("checkpoint lacks block '" + name + "'");
}

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& c) {
  if (c.names.size() != c.blocks.size()) {
    throw RuntimeError("checkpoint names and blocks differ in count");
  }
  Json header = c.header;
  Json blocks = Json::array();
  for (size_t b = 0; b < c.blocks.size(); ++b) {
    blocks.push_back({{"name", c.names[b]},
                      {"shape", {c.blocks[b].rows(), c.blocks[b].cols()}}});
  }
  header["blocks"] = blocks;
  const std::string text = header.dump();
  std::string out(kMagic, sizeof(kMagic));
  AppendU64(out, text.size());
  out += text;
  for (const Matrix& m : c.blocks) {
    for (Eigen::Index i = 0; i < m.size(); ++i) AppendDouble(out, m.data()[i]);
  }
  return out;
}

Checkpoint DeserializeCheckpoint(const std::string& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw DataError("not a seqrec checkpoint");
  }
  const uint64_t len = ReadU64(bytes.data() + 8);
  if (len > bytes.size() - 16) throw DataError("checkpoint header is truncated");
  Checkpoint c;
  try {
    c.header = Json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<long>(len));
  } catch (const Json::parse_error&) {
    throw DataError("checkpoint header is not valid JSON");
  }
  const Json& blocks = Field(c.header, "blocks");
  if (!blocks.is_array()) throw DataError("checkpoint blocks are malformed");
  size_t offset = 16 + len;
  for (const Json& b : blocks) {
    if (!b.is_object() || !b.contains("name") || !b["name"].is_string()) {
      throw DataError("checkpoint block entry is malformed");
    }
    const size_t count = CheckedCount(Field(b, "shape"));
    if (count > (bytes.size() - offset) / 8) throw DataError("checkpoint payload is truncated");
    Matrix m(b["shape"][0].get<Eigen::Index>(), b["shape"][1].get<Eigen::Index>());
    for (size_t i = 0; i < count; ++i) {
      m.data()[i] = std::bit_cast<double>(ReadU64(bytes.data() + offset + 8 * i));
    }
    offset += 8 * count;
    c.names.push_back(b["name"].get<std::string>());
    c.blocks.push_back(std::move(m));
  }
  if (offset != bytes.size()) throw DataError("checkpoint has trailing bytes");
  c.header.erase("blocks");
  return c;
}

void WriteCheckpoint(const std::filesystem::path& path, const Checkpoint& c) {
  WriteFileAtomic(path, SerializeCheckpoint(c));
}

Checkpoint ReadCheckpoint(const std::filesystem::path& path) {
  return DeserializeCheckpoint(ReadFile(path));
}

Checkpoint ToCheckpoint(const ModelParams& params, uint64_t config_hash) {
  Checkpoint c;
  c.header["kind"] = ToString(params.config.kind);
  c.header["dim"] = params.config.dim;
  c.header["catalog_size"] = params.catalog_size;
  c.header["seed"] = params.seed;
  c.header["config_hash"] = config_hash;
  c.header["encoder"] = ToJson(params.config);
  c.names = params.names;
  c.blocks = params.blocks;
  return c;
}

ModelParams ModelFromCheckpoint(const Checkpoint& c) {
  ModelParams p;
  try {
    p.config = EncoderConfigFromJson(Field(c.header, "encoder"));
    p.catalog_size = Field(c.header, "catalog_size").get<size_t>();
    p.seed = Field(c.header, "seed").get<uint64_t>();
  } catch (const Json::exception&) {
    throw DataError("checkpoint header has malformed model fields");
  } catch (const Error& e) {
    throw DataError(std::string("checkpoint encoder config: ") + e.what());
  }
  const auto layout = ParamLayout(p.config, p.catalog_size);
  if (layout.size() != c.blocks.size()) {
    throw DataError("checkpoint block count does not match the model layout");
  }
  for (size_t b = 0; b < layout.size(); ++b) {
    if (layout[b].name != c.names[b] || layout[b].rows != c.blocks[b].rows() ||
        layout[b].cols != c.blocks[b].cols()) {
      throw DataError("checkpoint block '" + c.names[b] + "' does not match the layout");
    }
  }
  p.names = c.names;
  p.blocks = c.blocks;
  return p;
}

Checkpoint PopularityCheckpoint(const std::vector<double>& counts) {
  Checkpoint c;
  c.header["kind"] = "popularity";
  c.header["catalog_size"] = counts.size();
  c.names = {"counts"};
  c.blocks.emplace_back(Eigen::Map<const Matrix>(counts.data(), 1,
                                                 static_cast<Eigen::Index>(counts.size())));
  return c;
}

std::vector<double> PopularityFromCheckpoint(const Checkpoint& c) {
  if (Kind(c) != "popularity") throw DataError("checkpoint is not a popularity model");
  const Matrix& m = Block(c, "counts");
  return {m.data(), m.data() + m.size()};
}

Checkpoint MfBprCheckpoint(const MfBprModel& model) {
  Checkpoint c;
  c.header["kind"] = "mf_bpr";
  c.header["dim"] = model.item_embeddings.cols();
  c.header["catalog_size"] = model.item_embeddings.rows();
  c.names = {"user_embeddings", "item_embeddings"};
  c.blocks = {model.user_embeddings, model.item_embeddings};
  return c;
}

MfBprModel MfBprFromCheckpoint(const Checkpoint& c) {
  if (Kind(c) != "mf_bpr") throw DataError("checkpoint is not an mf_bpr model");
  MfBprModel m{Block(c, "user_embeddings"), Block(c, "item_embeddings")};
  if (m.user_embeddings.cols() != m.item_embeddings.cols()) {
    throw DataError("mf_bpr checkpoint embedding widths differ");
  }
  return m;
}

}  // namespace seqrec
