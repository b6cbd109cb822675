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

std::vector<FieldClass> classify_fields(const std::vector<FieldCount>& fields, double hot_ratio)
{
	std::uint64_t total = 0;
	for(const auto& f : fields)
	{
		total += f.accesses;
	}
	// count >= ratio * total / n  <=>  count * n >= ratio * total
	const auto n = static_cast<double>(fields.size());
	const double threshold = hot_ratio * static_cast<double>(total);

	std::vector<FieldClass> out;
	out.reserve(fields.size());
	for(const auto& f : fields)
	{
		out.push_back({f.field, f.accesses, static_cast<double>(f.accesses) * n >= threshold});
	}
	return out;
}

bool is_live(std::uint64_t type_accesses, std::uint64_t total_accesses, double live_fraction)
{
	return type_accesses > 0 && static_cast<double>(type_accesses) >= live_fraction * static_cast<double>(total_accesses);
}

void StructSplitting::on_configure(const KernelArgs& args)
{
	ArgReader reader(args, name());
	m_live_threshold = reader.get_double("live_threshold", kDefaultLiveThreshold);
	m_hot_ratio = reader.get_double("hot_ratio", kDefaultHotRatio);
	reader.finish();
	if(!(m_live_threshold >= 0.0 && m_live_threshold <= 1.0))
	{
		fail(Errc::config_error, "live_threshold must lie in [0, 1]");
	}
	if(!(m_hot_ratio > 0.0))
	{
		fail(Errc::config_error, "hot_ratio must be positive");
	}
}

void StructSplitting::on_entry(const LogEntry& entry)
{
	if(const auto* acc = entry.access())
	{
		++m_counts[acc->variable];
		++m_total;
	}
}

Report StructSplitting::on_finalize()
{
	struct TypeStats
	{
		std::string name;
		std::uint64_t total = 0;
		std::vector<FieldCount> fields;
	};
	std::map<std::string, TypeStats> types;
	for(const auto& [var, count] : m_counts)
	{
		const auto& full = names().resolve(Namespace::variables, var);
		const auto dot = full.find('.');
		if(dot == std::string::npos || dot == 0 || dot + 1 == full.size())
		{
			continue;
		}
		auto& t = types[full.substr(0, dot)];
		t.name = full.substr(0, dot);
		t.total += count;
		t.fields.push_back({full.substr(dot + 1), count});
	}

	std::vector<TypeStats*> live;
	for(auto& [type_name, t] : types)
	{
		if(is_live(t.total, m_total, m_live_threshold))
		{
			live.push_back(&t);
		}
	}
	std::sort(live.begin(), live.end(), [](const TypeStats* a, const TypeStats* b) {
		if(a->total != b->total)
		{
			return a->total > b->total;
		}
		return a->name < b->name;
	});

	Report report(kName, {"Type", "Field", "Access count", "Classification", "Type live"});
	nlohmann::ordered_json chart = nlohmann::ordered_json::array();
	for(const auto* t : live)
	{
		auto classes = classify_fields(t->fields, m_hot_ratio);
		std::sort(classes.begin(), classes.end(), [](const FieldClass& a, const FieldClass& b) {
			if(a.accesses != b.accesses)
			{
				return a.accesses > b.accesses;
			}
			return a.field < b.field;
		});

		nlohmann::ordered_json bars = nlohmann::ordered_json::array();
		for(const auto& c : classes)
		{
			report.add_row({t->name, c.field, c.accesses, c.hot ? "hot" : "cold", true});
			bars.push_back({{"field", c.field}, {"weight", c.accesses}, {"hot", c.hot}});
		}
		chart.push_back({{"type", t->name}, {"accesses", t->total}, {"fields", std::move(bars)}});
	}
	report.chart = std::move(chart);
	return report;
}

} // namespace tracekit
