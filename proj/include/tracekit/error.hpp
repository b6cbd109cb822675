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

#include <stdexcept>
#include <string>
#include <string_view>

namespace tracekit {

/// Failure categories shared by every stage of the pipeline.
enum class Errc
{
	malformed_entry,
	unknown_id,
	io_error,
	malformed_json,
	conflicting_mapping,
	malformed_spec,
	invalid_spec,
	connection_refused,
	truncated_trace,
	incompatible_stages,
	kernel_error,
	unannotated_trace,
	single_thread,
	target_not_found,
	unknown_kernel,
	config_error,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error
{
public:
	Error(Errc code, const std::string& what);

	Errc code() const noexcept { return m_code; }
	// Message without the category prefix.
	const std::string& detail() const noexcept { return m_detail; }

private:
	Errc m_code;
	std::string m_detail;
};

[[noreturn]] void fail(Errc code, const std::string& what);

} // namespace tracekit
