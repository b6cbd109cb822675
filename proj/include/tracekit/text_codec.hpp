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

#include <string>
#include <string_view>

#include "tracekit/log_entry.hpp"
#include "tracekit/string_table.hpp"

namespace tracekit {

/// One newline-terminated line of space-delimited fields. Integers are
/// decimal; names are resolved through the table and percent-escaped so a
/// name never contains a space, newline or bare '%'.
///
///   0 <thread> <hint> <function> <phase>
///   1 <thread> <hint> <address> <kind> <variable> <type> <value> <file> <line> <column>
///   2 <thread> <hint> <base> <elem_size> <count> <type> <file> <line> <column>
///
/// Throws Errc::unknown_id for ids missing from the table.
std::string encode_text(const LogEntry& entry, const StringTable& table);

/// Accepts a line with or without its trailing newline. Wrong field counts
/// and non-numeric fields throw Errc::malformed_entry; names missing from the
/// table throw Errc::unknown_id.
LogEntry decode_text(std::string_view line, const StringTable& table);

std::string escape_name(std::string_view name);
std::string unescape_name(std::string_view text);

} // namespace tracekit
