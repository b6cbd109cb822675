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

#include "tracekit/error.hpp"

namespace tracekit {

void CacheOffenders::on_configure(const KernelArgs& args)
{
	ArgReader reader(args, name());
	m_top = reader.get_uint("top", 0);
	reader.finish();
}

void CacheOffenders::on_entry(const LogEntry& entry)
{
	const auto* acc = entry.access();
	if(acc == nullptr)
	{
		return;
	}
	if(entry.hint == CacheHint::none)
	{
		fail(Errc::unannotated_trace, "access to " + names().resolve(Namespace::variables, acc->variable) + " carries no hit/miss annotation; run the trace through the cache simulator first");
	}
	auto& c = m_counts[Key{acc->variable, acc->loc.file, acc->loc.line}];
	++c.accesses;
	if(entry.hint == CacheHint::miss)
	{
		++c.misses;
	}
}

Report CacheOffenders::on_finalize()
{
	struct Row
	{
		const std::string* variable;
		const std::string* file;
		std::uint32_t line;
		Counts counts;
	};
	std::vector<Row> rows;
	rows.reserve(m_counts.size());
	for(const auto& [key, counts] : m_counts)
	{
		const auto& [var, file, line] = key;
		rows.push_back({&names().resolve(Namespace::variables, var), &names().resolve(Namespace::files, file), line, counts});
	}
	std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
		if(a.counts.misses != b.counts.misses)
		{
			return a.counts.misses > b.counts.misses;
		}
		if(a.counts.accesses != b.counts.accesses)
		{
			return a.counts.accesses > b.counts.accesses;
		}
		return std::tie(*a.variable, *a.file, a.line) < std::tie(*b.variable, *b.file, b.line);
	});
	if(m_top > 0 && rows.size() > m_top)
	{
		rows.resize(m_top);
	}

	Report report(kName, {"Variable Name", "File", "Line", "Miss count", "Access count"});
	for(const auto& r : rows)
	{
		report.add_row({*r.variable, *r.file, r.line, r.counts.misses, r.counts.accesses});
	}
	return report;
}

} // namespace tracekit
