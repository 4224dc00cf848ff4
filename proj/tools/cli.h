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


#ifndef SEQREC_TOOLS_CLI_H_
#define SEQREC_TOOLS_CLI_H_

#include <iosfwd>

namespace seqrec {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitData = 3, kExitRuntime = 4 };

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace seqrec

#endif  // SEQREC_TOOLS_CLI_H_
