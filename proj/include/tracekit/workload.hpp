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

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tracekit/allocator_spec.hpp"
#include "tracekit/log_entry.hpp"
#include "tracekit/string_table.hpp"

namespace tracekit {

struct WorkloadSpec
{
	std::string scenario;
	// Scenario parameters; keys missing here take the catalog default.
	std::map<std::string, std::int64_t> params;
	std::uint64_t seed = 0;
};

/// {"scenario": "...", "params": {"k": v, ...}, "seed": n}
WorkloadSpec workload_from_json(const nlohmann::json& doc);
nlohmann::json workload_to_json(const WorkloadSpec& spec);

struct ParamInfo
{
	std::string name;
	std::int64_t default_value;
	std::int64_t min;
	std::int64_t max;
	std::string description;
};

struct ScenarioInfo
{
	std::string name;
	std::vector<ParamInfo> params;
	std::string description;
};

const std::vector<ScenarioInfo>& scenario_catalog();

/// Fills in defaults and checks ranges. Unknown scenarios, unknown keys and
/// out-of-range values throw Errc::invalid_spec.
WorkloadSpec resolve_workload(const WorkloadSpec& spec);

/// Runs the scenario and returns its global event stream. Names are
/// interned into table. The stream depends only on the spec and seed.
std::vector<LogEntry> run_workload(const WorkloadSpec& spec, StringTable& table);
std::vector<LogEntry> run_workload(const WorkloadSpec& spec, StringTable& table, const std::vector<AllocatorSpec>& allocators);

/// Bump allocator standing in for the program heap. Allocator calls are
/// decoded through their AllocatorSpec exactly as the instrumentation would.
class EmulatedHeap
{
public:
	static constexpr std::uint64_t kBase = 0x1000'0000;
	static constexpr std::uint64_t kAlignment = 8;

	explicit EmulatedHeap(std::vector<AllocatorSpec> allocators);

	/// Returns the allocation event for `allocator(args...)`. Unknown
	/// allocators or argument lists too short for the spec throw
	/// Errc::invalid_spec.
	AllocEvent call(std::string_view allocator, std::span<const std::uint64_t> args, StringId type, SourceLoc loc);

	std::uint64_t next_free() const { return m_next_free; }
	const std::vector<AllocEvent>& log() const { return m_log; }

private:
	std::vector<AllocatorSpec> m_allocators;
	std::uint64_t m_next_free = kBase;
	std::vector<AllocEvent> m_log;
};

/// Merges per-thread programs into one stream: seeded round-robin where each
/// turn runs a burst of 1..max_burst events. Per-thread order is preserved.
std::vector<LogEntry> interleave(std::vector<std::vector<LogEntry>> per_thread, std::mt19937_64& rng, std::size_t max_burst = 16);

} // namespace tracekit
