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

#include "seqrec/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>

#include "seqrec/error.h"
#include "seqrec/random.h"

namespace seqrec {

namespace {

// Splits without allocating; trailing '\r' is stripped by the caller.
void SplitFields(std::string_view line, char delimiter,
                 std::vector<std::string_view>& fields) {
  fields.clear();
  size_t start = 0;
  while (true) {
    size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> ParseTimestamp(std::string_view s) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

UserIndex InteractionLog::InternUser(const std::string& id) {
  auto [it, inserted] =
      user_index_.try_emplace(id, static_cast<UserIndex>(user_ids_.size()));
  if (inserted) user_ids_.push_back(id);
  return it->second;
}

ItemIndex InteractionLog::InternItem(const std::string& id) {
  auto [it, inserted] =
      item_index_.try_emplace(id, static_cast<ItemIndex>(item_ids_.size()));
  if (inserted) item_ids_.push_back(id);
  return it->second;
}

void InteractionLog::Add(const Interaction& interaction) {
  if (interaction.user_id.empty() || interaction.item_id.empty()) {
    throw DataError("interaction has an empty user or item id");
  }
  if (!std::isfinite(interaction.timestamp)) {
    throw DataError("interaction timestamp is not finite");
  }
  UserIndex user = InternUser(interaction.user_id);
  ItemIndex item = InternItem(interaction.item_id);
  events_.push_back({user, item, interaction.timestamp});
}

std::optional<ItemIndex> InteractionLog::FindItem(const std::string& id) const {
  auto it = item_index_.find(id);
  if (it == item_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<UserIndex> InteractionLog::FindUser(const std::string& id) const {
  auto it = user_index_.find(id);
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

InteractionLog IngestInteractions(const std::filesystem::path& path,
                                  const ColumnSpec& spec) {
  const int max_col = std::max(
      {spec.user_column, spec.item_column, spec.timestamp_column});
  if (spec.user_column < 0 || spec.item_column < 0 ||
      spec.timestamp_column < 0 || max_col >= spec.num_columns) {
    throw ConfigError("column indices must lie in [0, num_columns)");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());

  InteractionLog log;
  std::string line;
  std::vector<std::string_view> fields;
  std::string user, item;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && spec.has_header) continue;
    if (line.empty()) continue;
    SplitFields(line, spec.delimiter, fields);
    if (static_cast<int>(fields.size()) != spec.num_columns) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": expected "
          << spec.num_columns << " columns, found " << fields.size();
      throw DataError(msg.str());
    }
    std::string_view ts_field = Trim(fields[spec.timestamp_column]);
    std::optional<double> ts = ParseTimestamp(ts_field);
    if (!ts) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": unparseable timestamp '"
          << ts_field << "'";
      throw DataError(msg.str());
    }
    user.assign(Trim(fields[spec.user_column]));
    item.assign(Trim(fields[spec.item_column]));
    if (user.empty() || item.empty()) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": empty user or item id";
      throw DataError(msg.str());
    }
    UserIndex u = log.InternUser(user);
    ItemIndex i = log.InternItem(item);
    log.events_.push_back({u, i, *ts});
  }
  if (log.empty()) throw DataError(path.string() + ": no interactions");
  return log;
}

std::vector<UserSequence> BuildUserSequences(const InteractionLog& log) {
  const auto& events = log.events();
  std::vector<std::vector<size_t>> per_user(log.num_users());
  for (size_t e = 0; e < events.size(); ++e) {
    per_user[events[e].user].push_back(e);
  }
  std::vector<UserSequence> seqs(log.num_users());
  for (size_t u = 0; u < per_user.size(); ++u) {
    auto& idx = per_user[u];
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
      return events[a].timestamp < events[b].timestamp;
    });
    seqs[u].user = static_cast<UserIndex>(u);
    seqs[u].items.reserve(idx.size());
    for (size_t e : idx) seqs[u].items.push_back(events[e].item);
  }
  return seqs;
}

std::vector<UserSequence> FilterMinLength(std::vector<UserSequence> seqs,
                                          size_t min_len) {
  if (min_len < 1) throw ConfigError("min_len must be >= 1");
  std::erase_if(seqs, [&](const UserSequence& s) { return s.size() < min_len; });
  if (seqs.empty()) {
    throw DataError("no user has at least " + std::to_string(min_len) +
                    " interactions");
  }
  return seqs;
}

UserSequence TruncateRecent(UserSequence seq, size_t max_len) {
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
  if (seq.items.size() > max_len) {
    seq.items.erase(seq.items.begin(),
                    seq.items.end() - static_cast<std::ptrdiff_t>(max_len));
  }
  return seq;
}

SplitDataset LeaveOneOutSplit(const std::vector<UserSequence>& seqs,
                              size_t catalog_size,
                              size_t validation_user_count, uint64_t seed) {
  std::vector<UserIndex> too_short;
  for (const auto& s : seqs) {
    if (s.size() < 3) too_short.push_back(s.user);
  }
  if (!too_short.empty()) {
    std::ostringstream msg;
    msg << "leave-one-out split needs >= 3 items per user; too short:";
    for (size_t k = 0; k < too_short.size() && k < 20; ++k) {
      msg << " " << too_short[k];
    }
    if (too_short.size() > 20) msg << " ... (" << too_short.size() << " total)";
    throw DataError(msg.str());
  }

  // Partial Fisher-Yates over positions in `seqs`.
  std::vector<size_t> order(seqs.size());
  std::iota(order.begin(), order.end(), 0);
  const size_t count = std::min(validation_user_count, seqs.size());
  Rng rng(seed);
  for (size_t k = 0; k < count; ++k) {
    size_t j = k + UniformIndex(rng, order.size() - k);
    std::swap(order[k], order[j]);
  }
  std::vector<bool> is_validation(seqs.size(), false);
  for (size_t k = 0; k < count; ++k) is_validation[order[k]] = true;

  SplitDataset split;
  split.catalog_size = catalog_size;
  split.users.reserve(seqs.size());
  for (size_t k = 0; k < seqs.size(); ++k) {
    const auto& items = seqs[k].items;
    SplitUser su;
    su.user = seqs[k].user;
    su.test = items.back();
    size_t train_len = items.size() - 1;
    if (is_validation[k]) {
      su.validation = items[items.size() - 2];
      train_len = items.size() - 2;
      split.validation_users.push_back(su.user);
    }
    su.train.assign(items.begin(), items.begin() + train_len);
    split.users.push_back(std::move(su));
  }
  std::sort(split.validation_users.begin(), split.validation_users.end());
  return split;
}

std::vector<ItemIndex> TestInput(const SplitUser& user) {
  std::vector<ItemIndex> input = user.train;
  if (user.validation) input.push_back(*user.validation);
  return input;
}

DatasetStats ComputeStats(const std::vector<UserSequence>& seqs,
                          size_t catalog_size) {
  DatasetStats stats;
  stats.users = seqs.size();
  std::vector<bool> seen(catalog_size, false);
  std::vector<size_t> lengths;
  lengths.reserve(seqs.size());
  for (const auto& s : seqs) {
    stats.interactions += s.size();
    lengths.push_back(s.size());
    for (ItemIndex i : s.items) seen[i] = true;
  }
  stats.items = static_cast<size_t>(std::count(seen.begin(), seen.end(), true));
  if (lengths.empty()) return stats;
  stats.mean_length =
      static_cast<double>(stats.interactions) / static_cast<double>(stats.users);
  std::sort(lengths.begin(), lengths.end());
  const size_t mid = lengths.size() / 2;
  stats.median_length =
      lengths.size() % 2 == 1
          ? static_cast<double>(lengths[mid])
          : 0.5 * static_cast<double>(lengths[mid - 1] + lengths[mid]);
  stats.sparsity = 1.0 - static_cast<double>(stats.interactions) /
                             (static_cast<double>(stats.users) *
                              static_cast<double>(stats.items));
  return stats;
}

}  // namespace seqrec
