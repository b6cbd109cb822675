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

namespace tracekit {

void AccessCounter::on_entry(const LogEntry& entry)
{
	if(const auto* acc = entry.access())
	{
		++m_counts[acc->variable];
	}
}

void AccessCounter::on_batch(std::span<const LogEntry> batch)
{
	// map (variable, 1) -> reduceByKey(+) -> updateStateByKey(+)
	m_counts = keyed_update(
		std::move(m_counts), batch,
		[](const LogEntry& e) -> std::optional<std::pair<StringId, std::uint64_t>> {
			if(const auto* acc = e.access())
			{
				return std::pair{acc->variable, std::uint64_t{1}};
			}
			return std::nullopt;
		},
		[](std::uint64_t a, std::uint64_t b) { return a + b; });
}

Report AccessCounter::build() const
{
	struct Row
	{
		const std::string* name;
		std::uint64_t count;
	};
	std::vector<Row> rows;
	rows.reserve(m_counts.size());
	for(const auto& [var, count] : m_counts)
	{
		rows.push_back({&names().resolve(Namespace::variables, var), count});
	}
	std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
		if(a.count != b.count)
		{
			return a.count > b.count;
		}
		return *a.name < *b.name;
	});

	Report report(kName, {"Variable", "Accesses"});
	for(const auto& r : rows)
	{
		report.add_row({*r.name, r.count});
	}
	return report;
}

} // namespace tracekit
