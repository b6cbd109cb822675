// SPDX-License-Identifier: Apache-2.0
/*
Copyright (C) 2026 The tracekit Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.

*/

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tracekit {

/// Runs the tracekit command line. args excludes the program name.
/// Returns the process exit code: 0 on success, 1 on a pipeline error,
/// 2 on a usage error. Diagnostics go to err as a single line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Markdown reference of every subcommand, option and default.
std::string cli_reference();

} // namespace tracekit
