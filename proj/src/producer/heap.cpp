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

#include "tracekit/workload.hpp"

#include "tracekit/error.hpp"

namespace tracekit {

EmulatedHeap::EmulatedHeap(std::vector<AllocatorSpec> allocators) :
	m_allocators(std::move(allocators))
{
}

AllocEvent EmulatedHeap::call(std::string_view allocator, std::span<const std::uint64_t> args, StringId type, SourceLoc loc)
{
	const auto* spec = find_allocator(m_allocators, allocator);
	if(spec == nullptr)
	{
		fail(Errc::invalid_spec, "allocator \"" + std::string(allocator) + "\" is not in the allocator config");
	}

	auto arg = [&](int index) {
		if(index < 0 || static_cast<std::size_t>(index) >= args.size())
		{
			fail(Errc::invalid_spec, "call to " + spec->name + " has no argument " + std::to_string(index));
		}
		return args[static_cast<std::size_t>(index)];
	};

	AllocEvent ev;
	ev.count = spec->count_index ? arg(*spec->count_index) : 1;
	ev.elem_size = arg(spec->size_index);
	if(!spec->returns_address())
	{
		// The out-pointer argument only has to exist.
		arg(spec->address_index);
	}
	if(ev.count == 0 || ev.elem_size == 0)
	{
		fail(Errc::invalid_spec, "zero-sized allocation through " + spec->name);
	}
	ev.base = m_next_free;
	ev.type = type;
	ev.loc = loc;

	const auto end = ev.base + ev.elem_size * ev.count;
	m_next_free = (end + kAlignment - 1) / kAlignment * kAlignment;
	m_log.push_back(ev);
	return ev;
}

std::vector<LogEntry> interleave(std::vector<std::vector<LogEntry>> per_thread, std::mt19937_64& rng, std::size_t max_burst)
{
	std::size_t total = 0;
	for(const auto& p : per_thread)
	{
		total += p.size();
	}

	std::vector<LogEntry> out;
	out.reserve(total);
	std::vector<std::size_t> cursor(per_thread.size(), 0);
	while(out.size() < total)
	{
		for(std::size_t t = 0; t < per_thread.size(); ++t)
		{
			auto& program = per_thread[t];
			if(cursor[t] == program.size())
			{
				continue;
			}
			const std::size_t burst = 1 + static_cast<std::size_t>(rng() % max_burst);
			const std::size_t stop = std::min(program.size(), cursor[t] + burst);
			for(; cursor[t] < stop; ++cursor[t])
			{
				out.push_back(std::move(program[cursor[t]]));
			}
		}
	}
	return out;
}

} // namespace tracekit
