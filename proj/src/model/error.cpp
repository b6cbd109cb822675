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

#include "tracekit/error.hpp"

namespace tracekit {

std::string_view to_string(Errc code)
{
	switch(code)
	{
	case Errc::malformed_entry: return "MalformedEntry";
	case Errc::unknown_id: return "UnknownId";
	case Errc::io_error: return "IoError";
	case Errc::malformed_json: return "MalformedJson";
	case Errc::conflicting_mapping: return "ConflictingMapping";
	case Errc::malformed_spec: return "MalformedSpec";
	case Errc::invalid_spec: return "InvalidSpec";
	case Errc::connection_refused: return "ConnectionRefused";
	case Errc::truncated_trace: return "TruncatedTrace";
	case Errc::incompatible_stages: return "IncompatibleStages";
	case Errc::kernel_error: return "KernelError";
	case Errc::unannotated_trace: return "UnannotatedTrace";
	case Errc::single_thread: return "SingleThread";
	case Errc::target_not_found: return "TargetNotFound";
	case Errc::unknown_kernel: return "UnknownKernel";
	case Errc::config_error: return "ConfigError";
	}
	return "Unknown";
}

Error::Error(Errc code, const std::string& what) :
	std::runtime_error(std::string(to_string(code)) + ": " + what),
	m_code(code),
	m_detail(what)
{
}

void fail(Errc code, const std::string& what)
{
	throw Error(code, what);
}

} // namespace tracekit
