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

#include "tracekit/kernels.hpp"

#include <algorithm>
#include <cstdio>

#include "tracekit/error.hpp"

namespace tracekit {

bool is_uniform(std::span<const std::uint64_t> per_thread_counts)
{
	if(per_thread_counts.size() < 2)
	{
		fail(Errc::single_thread, "uniformity needs at least two per-thread counts, got " + std::to_string(per_thread_counts.size()));
	}
	std::vector<std::uint64_t> sorted(per_thread_counts.begin(), per_thread_counts.end());
	std::partial_sort(sorted.begin(), sorted.begin() + 2, sorted.end(), std::greater<>());
	// a0 < 2 * a1 without overflow
	return sorted[0] - sorted[1] < sorted[1];
}

std::uint64_t ThreadHistogram::total() const
{
	std::uint64_t sum = 0;
	for(const auto& [thread, count] : counts)
	{
		sum += count;
	}
	return sum;
}

std::vector<std::uint64_t> ThreadHistogram::sorted_counts() const
{
	std::vector<std::uint64_t> out;
	out.reserve(counts.size());
	for(const auto& [thread, count] : counts)
	{
		out.push_back(count);
	}
	std::sort(out.begin(), out.end(), std::greater<>());
	return out;
}

std::string format_address(std::uint64_t address)
{
	char buf[24];
	std::snprintf(buf, sizeof buf, "0x%llX", static_cast<unsigned long long>(address));
	return buf;
}

namespace {

bool counts_for(const AccessEvent& acc, bool writes_only)
{
	return !writes_only || acc.kind == AccessKind::write;
}

} // namespace

void SharedVarPhase1::on_configure(const KernelArgs& args)
{
	ArgReader reader(args, name());
	m_writes_only = reader.get_bool("writes_only", false);
	m_top = reader.get_uint("top", 0);
	reader.finish();
}

void SharedVarPhase1::on_entry(const LogEntry& entry)
{
	const auto* acc = entry.access();
	if(acc != nullptr && counts_for(*acc, m_writes_only))
	{
		++m_counts[Key{acc->address, acc->variable, entry.thread}];
	}
}

std::vector<ThreadHistogram> SharedVarPhase1::ranked() const
{
	// m_counts is ordered by address, so each address is a contiguous run.
	std::vector<ThreadHistogram> out;
	auto it = m_counts.begin();
	while(it != m_counts.end())
	{
		const std::uint64_t address = std::get<0>(it->first);
		ThreadHistogram hist;
		hist.address = address;
		std::map<StringId, std::uint64_t> per_var;
		for(; it != m_counts.end() && std::get<0>(it->first) == address; ++it)
		{
			const auto& [addr, var, thread] = it->first;
			hist.counts[thread] += it->second;
			per_var[var] += it->second;
		}
		if(hist.counts.size() < 2)
		{
			continue;
		}
		const auto counts = hist.sorted_counts();
		if(!is_uniform(counts))
		{
			continue;
		}
		// Label with the variable most often seen at this address.
		const std::string* best_name = nullptr;
		std::uint64_t best = 0;
		for(const auto& [var, n] : per_var)
		{
			const auto& nm = names().resolve(Namespace::variables, var);
			if(best_name == nullptr || n > best || (n == best && nm < *best_name))
			{
				best_name = &nm;
				best = n;
				hist.variable = var;
			}
		}
		out.push_back(std::move(hist));
	}
	std::stable_sort(out.begin(), out.end(), [](const ThreadHistogram& a, const ThreadHistogram& b) {
		return a.total() > b.total();
	});
	return out;
}

Report SharedVarPhase1::on_finalize()
{
	auto rows = ranked();
	if(m_top > 0 && rows.size() > m_top)
	{
		rows.resize(m_top);
	}
	Report report(kName, {"Address", "#Accesses", "#Threads", "Variable"});
	for(const auto& h : rows)
	{
		report.add_row({format_address(h.address), h.total(), h.counts.size(), names().resolve(Namespace::variables, h.variable)});
	}
	return report;
}

void SharedVarPhase2::on_configure(const KernelArgs& args)
{
	ArgReader reader(args, name());
	m_writes_only = reader.get_bool("writes_only", false);
	m_top_k = reader.get_uint("top_k", 1);
	const bool has_target = reader.has("target");
	const bool has_address = reader.has("address");
	const std::string target = reader.get_string("target", "");
	const std::string addresses = reader.get_string("address", "");
	reader.finish();

	if(has_target && has_address)
	{
		fail(Errc::config_error, name() + ": give either target or address, not both");
	}
	if(m_top_k == 0)
	{
		fail(Errc::config_error, name() + ": top_k must be at least 1");
	}
	if(has_target)
	{
		if(target.empty())
		{
			fail(Errc::config_error, name() + ": target must name a variable");
		}
		m_target_name = target;
		m_target_var = names().find(Namespace::variables, target);
	}
	else if(has_address)
	{
		std::size_t pos = 0;
		while(pos <= addresses.size())
		{
			auto comma = addresses.find(',', pos);
			if(comma == std::string::npos)
			{
				comma = addresses.size();
			}
			const std::string item = addresses.substr(pos, comma - pos);
			std::size_t used = 0;
			std::uint64_t value = 0;
			try
			{
				value = std::stoull(item, &used, 0);
			}
			catch(const std::exception&)
			{
				used = 0;
			}
			if(item.empty() || used != item.size() || item[0] == '-')
			{
				fail(Errc::config_error, name() + ": bad address \"" + item + "\"");
			}
			m_target_addresses.insert(value);
			pos = comma + 1;
		}
	}
	else
	{
		m_phase1 = std::make_unique<SharedVarPhase1>(names());
		KernelArgs inner;
		inner["writes_only"] = m_writes_only ? "true" : "false";
		m_phase1->configure(inner);
	}
}

void SharedVarPhase2::on_entry(const LogEntry& entry)
{
	const auto* acc = entry.access();
	if(acc == nullptr || !counts_for(*acc, m_writes_only))
	{
		return;
	}
	if(m_phase1)
	{
		m_phase1->process(entry);
	}
	else if(m_target_name)
	{
		if(!m_target_var || acc->variable != *m_target_var)
		{
			return;
		}
	}
	else if(m_target_addresses.count(acc->address) == 0)
	{
		return;
	}
	++m_locations[LocationKey{acc->address, acc->variable, acc->loc.file, acc->loc.line}][entry.thread];
}

Report SharedVarPhase2::on_finalize()
{
	std::set<std::uint64_t> wanted = m_target_addresses;
	if(m_phase1)
	{
		const auto ranked = m_phase1->ranked();
		for(std::size_t i = 0; i < ranked.size() && i < m_top_k; ++i)
		{
			wanted.insert(ranked[i].address);
		}
		if(wanted.empty())
		{
			fail(Errc::target_not_found, "no shared address survived the single-thread and uniformity filters");
		}
	}

	// Fold addresses away: a location is (variable, file, line).
	std::map<std::tuple<StringId, StringId, std::uint32_t>, std::map<ThreadId, std::uint64_t>> merged;
	for(const auto& [key, threads] : m_locations)
	{
		const auto& [addr, var, file, line] = key;
		if(!m_target_name && wanted.count(addr) == 0)
		{
			continue;
		}
		auto& dst = merged[{var, file, line}];
		for(const auto& [tid, n] : threads)
		{
			dst[tid] += n;
		}
	}
	if(merged.empty())
	{
		std::string what;
		if(m_target_name)
		{
			what = "variable \"" + *m_target_name + "\"";
		}
		else
		{
			what = "address";
			for(auto a : wanted)
			{
				what += " " + format_address(a);
			}
		}
		fail(Errc::target_not_found, "no access to " + what + " in trace");
	}

	struct Row
	{
		const std::string* variable;
		const std::string* file;
		std::uint32_t line;
		const std::map<ThreadId, std::uint64_t>* threads;
		std::uint64_t total;
	};
	std::vector<Row> rows;
	for(const auto& [key, threads] : merged)
	{
		const auto& [var, file, line] = key;
		std::uint64_t total = 0;
		for(const auto& [tid, n] : threads)
		{
			total += n;
		}
		rows.push_back({&names().resolve(Namespace::variables, var), &names().resolve(Namespace::files, file), line, &threads, total});
	}
	std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
		if(a.total != b.total)
		{
			return a.total > b.total;
		}
		return std::tie(*a.variable, *a.file, a.line) < std::tie(*b.variable, *b.file, b.line);
	});

	Report report(kName, {"threadcount", "totalcount", "threads", "file", "line", "variable"});
	for(const auto& r : rows)
	{
		Cell pairs = Cell::array();
		for(const auto& [tid, n] : *r.threads)
		{
			pairs.push_back(Cell::array({static_cast<unsigned>(tid), n}));
		}
		report.add_row({r.threads->size(), r.total, std::move(pairs), *r.file, r.line, *r.variable});
	}
	return report;
}

} // namespace tracekit
