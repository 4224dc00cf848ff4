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


#ifndef SEQREC_IO_H_
#define SEQREC_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace seqrec {

// Writes to a sibling temporary file, then renames over `path`. Creates the
// parent directory. Throws RuntimeError on failure.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view content);

std::string ReadFile(const std::filesystem::path& path);

}  // namespace seqrec

#endif  // SEQREC_IO_H_
