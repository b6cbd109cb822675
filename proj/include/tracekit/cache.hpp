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
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tracekit/log_entry.hpp"
#include "tracekit/pipeline.hpp"
#include "tracekit/transport.hpp"

namespace tracekit {

/// Geometry of the single simulated cache level.
struct CacheConfig
{
	static constexpr std::uint64_t kFullyAssociative = 0;

	std::uint64_t capacity_bytes = 16ull << 20;
	std::uint64_t line_bytes = 64;
	// Ways per set; kFullyAssociative puts every line in one set.
	std::uint64_t associativity = 16;

	/// Line size must be a power of two, capacity divisible by
	/// line * ways, and the set count a power of two. Throws
	/// Errc::config_error.
	void validate() const;

	std::uint64_t ways() const;
	std::uint64_t sets() const;
	std::uint64_t lines() const { return capacity_bytes / line_bytes; }

	/// {"capacity_bytes": n, "line_bytes": n, "associativity": n | "full"}
	static CacheConfig from_json(const nlohmann::json& doc);
	nlohmann::json to_json() const;

	friend bool operator==(const CacheConfig&, const CacheConfig&) = default;
};

/// LRU recency state of every set. Reads and writes are handled alike:
/// a miss always allocates.
class CacheState
{
public:
	explicit CacheState(const CacheConfig& cfg);

	/// Returns true on a hit. The accessed line becomes most recently used;
	/// on a miss into a full set the least recently used line is evicted.
	bool access(std::uint64_t address);

	/// Resident line numbers of one set, most recently used first.
	std::vector<std::uint64_t> set_contents(std::uint64_t set) const;

	const CacheConfig& config() const { return m_cfg; }
	std::uint64_t hits() const { return m_hits; }
	std::uint64_t misses() const { return m_misses; }

private:
	static constexpr std::uint32_t kNil = 0xFFFFFFFFu;

	void unlink(std::uint32_t slot, std::uint64_t set);
	void push_front(std::uint32_t slot, std::uint64_t set);

	CacheConfig m_cfg;
	unsigned m_line_shift = 0;
	std::uint64_t m_set_mask = 0;
	std::uint64_t m_ways = 0;

	std::vector<std::uint64_t> m_tag;
	std::vector<std::uint32_t> m_prev;
	std::vector<std::uint32_t> m_next;
	std::vector<std::uint32_t> m_head;
	std::vector<std::uint32_t> m_tail;
	std::vector<std::uint32_t> m_used;
	std::unordered_map<std::uint64_t, std::uint32_t> m_where;

	std::uint64_t m_hits = 0;
	std::uint64_t m_misses = 0;
};

/// Annotates access events with hit/miss; everything else passes through
/// untouched.
class CacheSimulator
{
public:
	explicit CacheSimulator(const CacheConfig& cfg) : m_state(cfg) {}

	void annotate(LogEntry& entry);

	const CacheState& state() const { return m_state; }

private:
	CacheState m_state;
};

std::vector<LogEntry> simulate(std::vector<LogEntry> entries, const CacheConfig& cfg);

class SimulatingSource : public EntrySource
{
public:
	SimulatingSource(std::unique_ptr<EntrySource> upstream, const CacheConfig& cfg) :
		m_upstream(std::move(upstream)), m_sim(cfg)
	{
	}

	std::optional<LogEntry> next() override;

	const CacheSimulator& simulator() const { return m_sim; }

private:
	std::unique_ptr<EntrySource> m_upstream;
	CacheSimulator m_sim;
};

class SimulateStage : public Stage
{
public:
	explicit SimulateStage(CacheConfig cfg);

	std::string name() const override { return "simulate"; }
	StreamKind input() const override { return StreamKind::binary; }
	StreamKind output() const override { return StreamKind::binary; }
	std::unique_ptr<EntrySource> bind(std::unique_ptr<EntrySource> upstream) override;

private:
	CacheConfig m_cfg;
};

} // namespace tracekit
