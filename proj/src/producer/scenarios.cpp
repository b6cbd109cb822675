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

#include <algorithm>

#include "tracekit/error.hpp"

namespace tracekit {

namespace {

constexpr std::int64_t kNoLimit = std::int64_t{1} << 40;

using Params = std::map<std::string, std::int64_t>;

/// Event emitter for one emulated thread. Keeps a call stack so every
/// program finishes with balanced entry/exit events.
class ThreadProgram
{
public:
	explicit ThreadProgram(ThreadId thread) : m_thread(thread) {}

	void enter(StringId fn)
	{
		emit(FunctionEvent{fn, FunctionPhase::entry});
		m_stack.push_back(fn);
	}

	void leave()
	{
		emit(FunctionEvent{m_stack.back(), FunctionPhase::exit});
		m_stack.pop_back();
	}

	void leave_all()
	{
		while(!m_stack.empty())
		{
			leave();
		}
	}

	std::size_t depth() const { return m_stack.size(); }

	void access(const AccessEvent& ev) { emit(ev); }
	void alloc(const AllocEvent& ev) { emit(ev); }

	std::vector<LogEntry> take() { return std::move(m_entries); }

private:
	void emit(Payload p)
	{
		LogEntry e;
		e.thread = m_thread;
		e.payload = std::move(p);
		m_entries.push_back(std::move(e));
	}

	ThreadId m_thread;
	std::vector<StringId> m_stack;
	std::vector<LogEntry> m_entries;
};

/// Name interning shorthands bound to one table.
class Names
{
public:
	explicit Names(StringTable& table) : m_table(table) {}

	StringId file(std::string_view s) { return m_table.intern(Namespace::files, s); }
	StringId fn(std::string_view s) { return m_table.intern(Namespace::functions, s); }
	StringId var(std::string_view s) { return m_table.intern(Namespace::variables, s); }
	StringId type(std::string_view s) { return m_table.intern(Namespace::types, s); }

private:
	StringTable& m_table;
};

AccessEvent make_access(std::uint64_t address, AccessKind kind, StringId var, StringId type, std::uint64_t value, SourceLoc loc)
{
	AccessEvent ev;
	ev.address = address;
	ev.kind = kind;
	ev.variable = var;
	ev.type = type;
	ev.value_bits = value;
	ev.loc = loc;
	return ev;
}

bool chance(std::mt19937_64& rng, std::int64_t percent)
{
	return static_cast<std::int64_t>(rng() % 100) < percent;
}

// Emulates several threads bumping one shared statistics counter, the way
// a per-operation stats increment serializes a key-value store.
std::vector<LogEntry> shared_counter(const Params& p, std::mt19937_64& rng, Names& n, EmulatedHeap& heap)
{
	const auto threads = static_cast<std::size_t>(p.at("threads"));
	const auto iters = static_cast<std::uint64_t>(p.at("iters"));
	const bool noise = p.at("noise") != 0;
	constexpr std::uint64_t kScratchLen = 64;

	const auto file = n.file("shared_counter.c");
	const auto f_main = n.fn("main");
	const auto f_worker = n.fn("worker");
	const auto t_stats = n.type("stats");
	const auto t_u64 = n.type("uint64_t");
	const auto v_counter = n.var("stats.v");
	const auto v_scratch = n.var("scratch");

	ThreadProgram main_thread(checked_thread_id(0));
	main_thread.enter(f_main);
	const std::uint64_t stats_args[] = {8};
	const auto stats = heap.call("malloc", stats_args, t_stats, {file, 12, 3});
	main_thread.alloc(stats);
	std::vector<LogEntry> prologue = main_thread.take();

	std::vector<std::vector<LogEntry>> programs;
	for(std::size_t t = 0; t < threads; ++t)
	{
		ThreadProgram prog(checked_thread_id(t));
		prog.enter(f_worker);
		AllocEvent scratch{};
		if(noise)
		{
			const std::uint64_t args[] = {kScratchLen, 8};
			scratch = heap.call("calloc", args, t_u64, {file, 20, 5});
			prog.alloc(scratch);
		}
		for(std::uint64_t i = 0; i < iters; ++i)
		{
			prog.access(make_access(stats.base, AccessKind::write, v_counter, t_u64, i + 1, {file, 31, 9}));
			if(noise)
			{
				const auto slot = i % kScratchLen;
				prog.access(make_access(scratch.base + 8 * slot, AccessKind::write, v_scratch, t_u64, rng(), {file, 32, 9}));
			}
		}
		prog.leave();
		programs.push_back(prog.take());
	}

	auto body = interleave(std::move(programs), rng);
	main_thread.leave();
	auto epilogue = main_thread.take();

	prologue.insert(prologue.end(), std::make_move_iterator(body.begin()), std::make_move_iterator(body.end()));
	prologue.insert(prologue.end(), std::make_move_iterator(epilogue.begin()), std::make_move_iterator(epilogue.end()));
	return prologue;
}

std::string arc_field_name(std::size_t index)
{
	static const char* const kNames[] = {"ident", "cost", "tail", "head", "nextout", "nextin", "flow", "org_cost"};
	if(index < std::size(kNames))
	{
		return kNames[index];
	}
	return "field" + std::to_string(index);
}

// Array-of-structures scan: the hot field is tested on every element and
// the remaining fields are read only when the test matches.
std::vector<LogEntry> aos_traversal(const Params& p, std::mt19937_64& rng, Names& n, EmulatedHeap& heap)
{
	const auto elems = static_cast<std::uint64_t>(p.at("elems"));
	const auto fields = static_cast<std::size_t>(p.at("fields"));
	const auto hot = static_cast<std::size_t>(p.at("hot_field"));
	const auto passes = p.at("passes");
	const auto match_pct = p.at("match_pct");

	const auto f_alloc = n.file("implicit.c");
	const auto f_scan = n.file("pbeampp.c");
	const auto fn_main = n.fn("main");
	const auto fn_scan = n.fn("primal_bea_mpp");
	const auto t_arc = n.type("arc");
	const auto t_long = n.type("long");
	std::vector<StringId> field_vars;
	for(std::size_t f = 0; f < fields; ++f)
	{
		field_vars.push_back(n.var("arc." + arc_field_name(f)));
	}

	ThreadProgram prog(checked_thread_id(0));
	prog.enter(fn_main);
	const std::uint64_t args[] = {elems, 8 * fields};
	const auto arcs = heap.call("calloc", args, t_arc, {f_alloc, 48, 12});
	prog.alloc(arcs);

	std::vector<bool> matches(elems);
	for(std::uint64_t e = 0; e < elems; ++e)
	{
		matches[e] = chance(rng, match_pct);
	}

	for(std::int64_t pass = 0; pass < passes; ++pass)
	{
		prog.enter(fn_scan);
		for(std::uint64_t e = 0; e < elems; ++e)
		{
			const auto base = arcs.base + e * arcs.elem_size;
			prog.access(make_access(base + 8 * hot, AccessKind::read, field_vars[hot], t_long, matches[e] ? 1 : 0, {f_scan, 167, 13}));
			if(!matches[e])
			{
				continue;
			}
			std::uint32_t line = 169;
			for(std::size_t f = 0; f < fields; ++f)
			{
				if(f == hot)
				{
					continue;
				}
				prog.access(make_access(base + 8 * f, AccessKind::read, field_vars[f], t_long, e, {f_scan, line++, 17}));
			}
		}
		prog.leave();
	}
	prog.leave();
	return prog.take();
}

// Grid of list-linked cells. Layout 0 keeps the particle payload inline
// (fat nodes spanning many lines); layout 1 moves it out of line behind a
// 16-byte node.
std::vector<LogEntry> linked_cells(const Params& p, std::mt19937_64& rng, Names& n, EmulatedHeap& heap)
{
	const auto cells = static_cast<std::uint64_t>(p.at("cells"));
	const auto payload = static_cast<std::uint64_t>(p.at("payload_bytes"));
	const bool split = p.at("layout") == 1;
	const auto passes = p.at("passes");
	const auto payload_pct = p.at("payload_pct");
	const auto threads = static_cast<std::size_t>(p.at("threads"));

	const auto f_init = n.file("fluid.cpp");
	const auto f_clear = n.file("pthreads.cpp");
	const auto f_hdr = n.file("./fluid.hpp");
	const auto fn_main = n.fn("main");
	const auto fn_clear = n.fn("ClearParticlesMT");
	const auto t_cell = n.type("Cell");
	const auto t_vec3 = n.type("Vec3");
	const auto t_ptr = n.type("Cell*");
	const auto t_float = n.type("float");
	const auto v_next = n.var("Cell.next");
	const auto v_x = n.var("Vec3.x");

	ThreadProgram main_thread(checked_thread_id(0));
	main_thread.enter(fn_main);

	constexpr std::uint64_t kNodeSize = 16;
	AllocEvent nodes;
	AllocEvent payloads;
	std::uint64_t next_offset = 0;
	if(split)
	{
		const std::uint64_t node_args[] = {cells, kNodeSize};
		nodes = heap.call("calloc", node_args, t_cell, {f_init, 210, 11});
		const std::uint64_t payload_args[] = {cells, payload};
		payloads = heap.call("calloc", payload_args, t_vec3, {f_init, 214, 11});
		main_thread.alloc(nodes);
		main_thread.alloc(payloads);
		next_offset = 8;
	}
	else
	{
		const std::uint64_t node_args[] = {cells, payload + kNodeSize};
		nodes = heap.call("calloc", node_args, t_cell, {f_init, 210, 11});
		main_thread.alloc(nodes);
		payloads = nodes;
		next_offset = payload;
	}
	std::vector<LogEntry> prologue = main_thread.take();

	std::vector<std::vector<LogEntry>> programs;
	for(std::size_t t = 0; t < threads; ++t)
	{
		const auto first = cells * t / threads;
		const auto last = cells * (t + 1) / threads;
		ThreadProgram prog(checked_thread_id(t));
		for(std::int64_t pass = 0; pass < passes; ++pass)
		{
			prog.enter(fn_clear);
			for(auto c = first; c < last; ++c)
			{
				prog.access(make_access(nodes.base + c * nodes.elem_size + next_offset, AccessKind::write, v_next, t_ptr, 0, {f_clear, 530, 26}));
				if(chance(rng, payload_pct))
				{
					prog.access(make_access(payloads.base + c * payloads.elem_size, AccessKind::read, v_x, t_float, rng() & 0xFFFFFFFF, {f_hdr, 354, 15}));
				}
			}
			prog.leave();
		}
		programs.push_back(prog.take());
	}

	auto body = interleave(std::move(programs), rng);
	main_thread.leave();
	auto epilogue = main_thread.take();
	prologue.insert(prologue.end(), std::make_move_iterator(body.begin()), std::make_move_iterator(body.end()));
	prologue.insert(prologue.end(), std::make_move_iterator(epilogue.begin()), std::make_move_iterator(epilogue.end()));
	return prologue;
}

// Threads hammering randomly sized record arrays plus private buffers, with
// nested helper calls and a uniformly shared counter every 16th access.
std::vector<LogEntry> random_mix(const Params& p, std::mt19937_64& rng, Names& n, EmulatedHeap& heap)
{
	const auto threads = static_cast<std::size_t>(p.at("threads"));
	const auto accesses = static_cast<std::uint64_t>(p.at("accesses"));
	const auto vars = static_cast<std::size_t>(p.at("vars"));
	const auto call_pct = p.at("call_pct");
	constexpr std::uint64_t kLocalLen = 64;
	constexpr std::size_t kMaxDepth = 4;

	const auto file = n.file("mix.c");
	const auto fn_main = n.fn("main");
	const auto fn_worker = n.fn("worker");
	const auto fn_helper = n.fn("helper");
	const auto t_long = n.type("long");
	const auto t_stats = n.type("stats");
	const auto v_counter = n.var("stats.ops");
	const auto v_local = n.var("local");

	struct Record
	{
		AllocEvent alloc;
		std::vector<StringId> fields;
	};

	ThreadProgram main_thread(checked_thread_id(0));
	main_thread.enter(fn_main);
	std::vector<Record> records;
	for(std::size_t k = 0; k < vars; ++k)
	{
		const std::string type_name = "rec" + std::to_string(k);
		const auto field_count = 1 + rng() % 8;
		const std::uint64_t args[] = {16 + rng() % 1009, 8 * field_count};
		Record r;
		r.alloc = heap.call("calloc", args, n.type(type_name), {file, static_cast<std::uint32_t>(40 + k), 7});
		for(std::uint64_t f = 0; f < field_count; ++f)
		{
			r.fields.push_back(n.var(type_name + ".f" + std::to_string(f)));
		}
		main_thread.alloc(r.alloc);
		records.push_back(std::move(r));
	}
	const std::uint64_t stats_args[] = {8};
	const auto stats = heap.call("malloc", stats_args, t_stats, {file, 30, 5});
	main_thread.alloc(stats);
	std::vector<LogEntry> prologue = main_thread.take();

	std::vector<std::vector<LogEntry>> programs;
	for(std::size_t t = 0; t < threads; ++t)
	{
		const auto budget = accesses / threads + (t < accesses % threads ? 1 : 0);
		ThreadProgram prog(checked_thread_id(t));
		prog.enter(fn_worker);
		const std::uint64_t local_args[] = {kLocalLen, 8};
		const auto local = heap.call("calloc", local_args, t_long, {file, 60, 9});
		prog.alloc(local);

		for(std::uint64_t i = 0; i < budget; ++i)
		{
			if(prog.depth() > 1 && chance(rng, call_pct))
			{
				prog.leave();
			}
			else if(prog.depth() < kMaxDepth && chance(rng, call_pct))
			{
				prog.enter(fn_helper);
			}

			if(i % 16 == 15)
			{
				prog.access(make_access(stats.base, AccessKind::write, v_counter, t_long, i, {file, 90, 5}));
			}
			else if(chance(rng, 20))
			{
				const auto slot = rng() % kLocalLen;
				prog.access(make_access(local.base + 8 * slot, static_cast<AccessKind>(rng() % 2), v_local, t_long, rng(), {file, 70, 11}));
			}
			else
			{
				const auto k = rng() % records.size();
				const auto& r = records[k];
				const auto elem = rng() % r.alloc.count;
				const auto field = rng() % r.fields.size();
				const auto address = r.alloc.base + elem * r.alloc.elem_size + 8 * field;
				prog.access(make_access(address, static_cast<AccessKind>(rng() % 2), r.fields[field], t_long, rng(), {file, static_cast<std::uint32_t>(100 + k), static_cast<std::uint32_t>(field + 1)}));
			}
		}
		prog.leave_all();
		programs.push_back(prog.take());
	}

	auto body = interleave(std::move(programs), rng);
	main_thread.leave();
	auto epilogue = main_thread.take();
	prologue.insert(prologue.end(), std::make_move_iterator(body.begin()), std::make_move_iterator(body.end()));
	prologue.insert(prologue.end(), std::make_move_iterator(epilogue.begin()), std::make_move_iterator(epilogue.end()));
	return prologue;
}

const ScenarioInfo& find_scenario(const std::string& name)
{
	for(const auto& s : scenario_catalog())
	{
		if(s.name == name)
		{
			return s;
		}
	}
	std::string known;
	for(const auto& s : scenario_catalog())
	{
		known += (known.empty() ? "" : ", ") + s.name;
	}
	fail(Errc::invalid_spec, "unknown scenario \"" + name + "\" (known: " + known + ")");
}

} // namespace

const std::vector<ScenarioInfo>& scenario_catalog()
{
	static const std::vector<ScenarioInfo> kCatalog = {
		{"aos_traversal",
		 {{"elems", 4096, 1, kNoLimit, "number of array elements"},
		  {"fields", 8, 1, 4096, "8-byte fields per element"},
		  {"hot_field", 0, 0, 4095, "index of the field tested on every element"},
		  {"passes", 1, 1, kNoLimit, "full scans of the array"},
		  {"match_pct", 10, 0, 100, "percent of elements whose other fields are read"}},
		 "array-of-structures scan testing one hot field per element"},
		{"linked_cells",
		 {{"cells", 4096, 1, kNoLimit, "number of grid cells"},
		  {"payload_bytes", 880, 8, 1 << 20, "particle payload per cell"},
		  {"layout", 0, 0, 1, "0 = payload inline (fat), 1 = payload out of line (split)"},
		  {"passes", 2, 1, kNoLimit, "traversals of the cell grid"},
		  {"payload_pct", 5, 0, 100, "percent of visited cells whose payload is read"},
		  {"threads", 1, 1, 256, "threads partitioning the grid"}},
		 "cell list traversal touching only the next pointer"},
		{"shared_counter",
		 {{"threads", 8, 1, 256, "worker threads"},
		  {"iters", 1000, 1, kNoLimit, "counter increments per thread"},
		  {"noise", 1, 0, 1, "1 = also write a private per-thread array"}},
		 "threads incrementing one shared statistics counter"},
		{"random_mix",
		 {{"threads", 4, 1, 256, "worker threads"},
		  {"accesses", 10000, 1, kNoLimit, "total memory accesses across threads"},
		  {"vars", 16, 1, 4096, "record arrays shared by all threads"},
		  {"call_pct", 5, 0, 100, "percent chance per step of entering or leaving a helper call"}},
		 "random reads and writes over shared records, private buffers and a shared counter"},
	};
	return kCatalog;
}

WorkloadSpec resolve_workload(const WorkloadSpec& spec)
{
	const auto& info = find_scenario(spec.scenario);
	for(const auto& [key, value] : spec.params)
	{
		const bool known = std::any_of(info.params.begin(), info.params.end(), [&](const ParamInfo& p) { return p.name == key; });
		if(!known)
		{
			fail(Errc::invalid_spec, "scenario " + info.name + " has no parameter \"" + key + "\"");
		}
	}

	WorkloadSpec out = spec;
	for(const auto& p : info.params)
	{
		auto [it, inserted] = out.params.emplace(p.name, p.default_value);
		if(it->second < p.min || it->second > p.max)
		{
			fail(Errc::invalid_spec, info.name + "." + p.name + " = " + std::to_string(it->second) + " outside [" + std::to_string(p.min) + ", " + std::to_string(p.max) + "]");
		}
	}
	if(out.scenario == "aos_traversal" && out.params["hot_field"] >= out.params["fields"])
	{
		fail(Errc::invalid_spec, "aos_traversal.hot_field must be < fields");
	}
	return out;
}

std::vector<LogEntry> run_workload(const WorkloadSpec& spec, StringTable& table)
{
	return run_workload(spec, table, parse_allocator_config(default_allocator_config()));
}

std::vector<LogEntry> run_workload(const WorkloadSpec& spec, StringTable& table, const std::vector<AllocatorSpec>& allocators)
{
	const auto resolved = resolve_workload(spec);
	std::mt19937_64 rng(resolved.seed);
	Names names(table);
	EmulatedHeap heap(allocators);

	const auto& s = resolved.scenario;
	if(s == "shared_counter")
	{
		return shared_counter(resolved.params, rng, names, heap);
	}
	if(s == "aos_traversal")
	{
		return aos_traversal(resolved.params, rng, names, heap);
	}
	if(s == "linked_cells")
	{
		return linked_cells(resolved.params, rng, names, heap);
	}
	return random_mix(resolved.params, rng, names, heap);
}

WorkloadSpec workload_from_json(const nlohmann::json& doc)
{
	try
	{
		WorkloadSpec spec;
		spec.scenario = doc.at("scenario").get<std::string>();
		if(auto it = doc.find("params"); it != doc.end())
		{
			for(const auto& [key, value] : it->items())
			{
				spec.params[key] = value.get<std::int64_t>();
			}
		}
		if(auto it = doc.find("seed"); it != doc.end())
		{
			spec.seed = it->get<std::uint64_t>();
		}
		return spec;
	}
	catch(const nlohmann::json::exception& e)
	{
		fail(Errc::invalid_spec, std::string("workload document: ") + e.what());
	}
}

nlohmann::json workload_to_json(const WorkloadSpec& spec)
{
	nlohmann::json params = nlohmann::json::object();
	for(const auto& [k, v] : spec.params)
	{
		params[k] = v;
	}
	return {{"scenario", spec.scenario}, {"params", params}, {"seed", spec.seed}};
}

} // namespace tracekit
