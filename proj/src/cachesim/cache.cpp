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

#include "tracekit/cache.hpp"

#include <algorithm>
#include <bit>

#include "tracekit/error.hpp"

namespace tracekit {

void CacheConfig::validate() const
{
	if(line_bytes == 0 || !std::has_single_bit(line_bytes))
	{
		fail(Errc::config_error, "line size " + std::to_string(line_bytes) + " is not a power of two");
	}
	if(capacity_bytes == 0 || capacity_bytes % line_bytes != 0)
	{
		fail(Errc::config_error, "capacity " + std::to_string(capacity_bytes) + " is not a multiple of the line size");
	}
	const auto w = ways();
	if(w == 0 || capacity_bytes % (line_bytes * w) != 0)
	{
		fail(Errc::config_error, "capacity " + std::to_string(capacity_bytes) + " is not divisible by line size * associativity");
	}
	if(!std::has_single_bit(sets()))
	{
		fail(Errc::config_error, "set count " + std::to_string(sets()) + " is not a power of two");
	}
	if(lines() >= 0xFFFFFFFFull)
	{
		fail(Errc::config_error, "cache has too many lines");
	}
}

std::uint64_t CacheConfig::ways() const
{
	return associativity == kFullyAssociative ? lines() : associativity;
}

std::uint64_t CacheConfig::sets() const
{
	return lines() / ways();
}

CacheConfig CacheConfig::from_json(const nlohmann::json& doc)
{
	CacheConfig cfg;
	if(!doc.is_object())
	{
		fail(Errc::config_error, "cache config must be a JSON object");
	}
	for(const auto& [key, value] : doc.items())
	{
		if(key != "capacity_bytes" && key != "line_bytes" && key != "associativity")
		{
			fail(Errc::config_error, "unknown cache config key \"" + key + "\"");
		}
	}
	try
	{
		if(auto it = doc.find("capacity_bytes"); it != doc.end())
		{
			cfg.capacity_bytes = it->get<std::uint64_t>();
		}
		if(auto it = doc.find("line_bytes"); it != doc.end())
		{
			cfg.line_bytes = it->get<std::uint64_t>();
		}
		if(auto it = doc.find("associativity"); it != doc.end())
		{
			if(it->is_string())
			{
				if(it->get<std::string>() != "full")
				{
					fail(Errc::config_error, "associativity must be a number or \"full\"");
				}
				cfg.associativity = kFullyAssociative;
			}
			else
			{
				cfg.associativity = it->get<std::uint64_t>();
			}
		}
	}
	catch(const nlohmann::json::exception& e)
	{
		fail(Errc::config_error, std::string("cache config: ") + e.what());
	}
	cfg.validate();
	return cfg;
}

nlohmann::json CacheConfig::to_json() const
{
	nlohmann::json doc = {{"capacity_bytes", capacity_bytes}, {"line_bytes", line_bytes}};
	if(associativity == kFullyAssociative)
	{
		doc["associativity"] = "full";
	}
	else
	{
		doc["associativity"] = associativity;
	}
	return doc;
}

CacheState::CacheState(const CacheConfig& cfg) :
	m_cfg(cfg)
{
	cfg.validate();
	m_line_shift = static_cast<unsigned>(std::countr_zero(cfg.line_bytes));
	m_set_mask = cfg.sets() - 1;
	m_ways = cfg.ways();

	const auto slots = cfg.lines();
	m_tag.assign(slots, 0);
	m_prev.assign(slots, kNil);
	m_next.assign(slots, kNil);
	m_head.assign(cfg.sets(), kNil);
	m_tail.assign(cfg.sets(), kNil);
	m_used.assign(cfg.sets(), 0);
	m_where.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(slots, 1u << 20)));
}

void CacheState::unlink(std::uint32_t slot, std::uint64_t set)
{
	const auto p = m_prev[slot];
	const auto n = m_next[slot];
	(p == kNil ? m_head[set] : m_next[p]) = n;
	(n == kNil ? m_tail[set] : m_prev[n]) = p;
	m_prev[slot] = kNil;
	m_next[slot] = kNil;
}

void CacheState::push_front(std::uint32_t slot, std::uint64_t set)
{
	const auto old = m_head[set];
	m_prev[slot] = kNil;
	m_next[slot] = old;
	if(old != kNil)
	{
		m_prev[old] = slot;
	}
	else
	{
		m_tail[set] = slot;
	}
	m_head[set] = slot;
}

bool CacheState::access(std::uint64_t address)
{
	const auto line = address >> m_line_shift;
	const auto set = line & m_set_mask;

	if(auto it = m_where.find(line); it != m_where.end())
	{
		const auto slot = it->second;
		if(m_head[set] != slot)
		{
			unlink(slot, set);
			push_front(slot, set);
		}
		++m_hits;
		return true;
	}

	std::uint32_t slot;
	if(m_used[set] < m_ways)
	{
		slot = static_cast<std::uint32_t>(set * m_ways + m_used[set]);
		++m_used[set];
	}
	else
	{
		slot = m_tail[set];
		m_where.erase(m_tag[slot]);
		unlink(slot, set);
	}
	m_tag[slot] = line;
	push_front(slot, set);
	m_where.emplace(line, slot);
	++m_misses;
	return false;
}

std::vector<std::uint64_t> CacheState::set_contents(std::uint64_t set) const
{
	std::vector<std::uint64_t> out;
	for(auto s = m_head.at(set); s != kNil; s = m_next[s])
	{
		out.push_back(m_tag[s]);
	}
	return out;
}

void CacheSimulator::annotate(LogEntry& entry)
{
	if(const auto* acc = entry.access())
	{
		entry.hint = m_state.access(acc->address) ? CacheHint::hit : CacheHint::miss;
	}
}

std::vector<LogEntry> simulate(std::vector<LogEntry> entries, const CacheConfig& cfg)
{
	CacheSimulator sim(cfg);
	for(auto& e : entries)
	{
		sim.annotate(e);
	}
	return entries;
}

std::optional<LogEntry> SimulatingSource::next()
{
	auto e = m_upstream->next();
	if(e)
	{
		m_sim.annotate(*e);
	}
	return e;
}

SimulateStage::SimulateStage(CacheConfig cfg) :
	m_cfg(cfg)
{
	m_cfg.validate();
}

std::unique_ptr<EntrySource> SimulateStage::bind(std::unique_ptr<EntrySource> upstream)
{
	return std::make_unique<SimulatingSource>(std::move(upstream), m_cfg);
}

} // namespace tracekit
