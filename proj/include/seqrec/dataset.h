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

#ifndef SEQREC_DATASET_H_
#define SEQREC_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace seqrec {

using UserIndex = int32_t;
using ItemIndex = int32_t;

struct Interaction {
  std::string user_id;
  std::string item_id;
  double timestamp = 0.0;
};

// How a delimiter-separated interaction file is laid out. Column indices are
// zero-based; every row must have exactly `num_columns` fields.
struct ColumnSpec {
  char delimiter = ',';
  bool has_header = false;
  int user_column = 0;
  int item_column = 1;
  int timestamp_column = 2;
  int num_columns = 3;
};

// Interactions with dense user and item indices assigned in first-seen order.
// Original identifiers are kept for reporting.
class InteractionLog {
 public:
  struct Event {
    UserIndex user;
    ItemIndex item;
    double timestamp;
  };

  void Add(const Interaction& interaction);

  UserIndex InternUser(const std::string& id);
  ItemIndex InternItem(const std::string& id);

  const std::vector<Event>& events() const { return events_; }
  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& item_ids() const { return item_ids_; }
  size_t num_users() const { return user_ids_.size(); }
  size_t num_items() const { return item_ids_.size(); }
  size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  std::optional<ItemIndex> FindItem(const std::string& id) const;
  std::optional<UserIndex> FindUser(const std::string& id) const;

 private:
  friend InteractionLog IngestInteractions(const std::filesystem::path&,
                                           const ColumnSpec&);
  std::vector<Event> events_;
  std::vector<std::string> user_ids_;
  std::vector<std::string> item_ids_;
  std::unordered_map<std::string, UserIndex> user_index_;
  std::unordered_map<std::string, ItemIndex> item_index_;
};

struct UserSequence {
  UserIndex user = 0;
  std::vector<ItemIndex> items;

  size_t size() const { return items.size(); }
  bool operator==(const UserSequence&) const = default;
};

// Leave-one-out holdouts for one user. `train` excludes every holdout.
struct SplitUser {
  UserIndex user = 0;
  std::vector<ItemIndex> train;
  std::optional<ItemIndex> validation;
  ItemIndex test = 0;

  bool operator==(const SplitUser&) const = default;
};

struct SplitDataset {
  std::vector<SplitUser> users;
  // Sorted ascending.
  std::vector<UserIndex> validation_users;
  size_t catalog_size = 0;

  bool operator==(const SplitDataset&) const = default;
};

// Throws DataError naming the line for malformed rows, and for empty input.
InteractionLog IngestInteractions(const std::filesystem::path& path,
                                  const ColumnSpec& spec);

// One sequence per user (in user-index order), items ordered by timestamp.
// Equal timestamps keep their original file order.
std::vector<UserSequence> BuildUserSequences(const InteractionLog& log);

// Keeps sequences with at least `min_len` items. Throws when nothing is left.
std::vector<UserSequence> FilterMinLength(std::vector<UserSequence> seqs,
                                          size_t min_len = 5);

// Keeps the `max_len` most recent items.
UserSequence TruncateRecent(UserSequence seq, size_t max_len = 50);

// Holds out each user's last item for test, and the second-to-last item for
// `validation_user_count` users drawn uniformly without replacement.
SplitDataset LeaveOneOutSplit(const std::vector<UserSequence>& seqs,
                              size_t catalog_size,
                              size_t validation_user_count, uint64_t seed);

// Items preceding the test holdout: train items plus the validation holdout
// when present.
std::vector<ItemIndex> TestInput(const SplitUser& user);

struct DatasetStats {
  size_t users = 0;
  size_t items = 0;
  size_t interactions = 0;
  double mean_length = 0.0;
  double median_length = 0.0;
  double sparsity = 0.0;
};

DatasetStats ComputeStats(const std::vector<UserSequence>& seqs,
                          size_t catalog_size);

}  // namespace seqrec

#endif  // SEQREC_DATASET_H_
