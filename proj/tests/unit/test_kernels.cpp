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

#include <doctest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "tracekit/cache.hpp"
#include "tracekit/error.hpp"
#include "tracekit/kernels.hpp"
#include "tracekit/workload.hpp"

using namespace tracekit;

namespace {

Errc code_of(const std::function<void()>& fn)
{
	try
	{
		fn();
	}
	catch(const Error& e)
	{
		return e.code();
	}
	FAIL("no tracekit::Error thrown");
	return Errc::config_error;
}

/// Hand-built traces with readable names.
struct Builder
{
	StringTable table;
	std::vector<LogEntry> entries;

	Builder& access(ThreadId thread, std::uint64_t address, const std::string& var, const std::string& file = "f.c", std::uint32_t line = 1, CacheHint hint = CacheHint::none, AccessKind kind = AccessKind::read)
	{
		AccessEvent a;
		a.address = address;
		a.kind = kind;
		a.variable = table.intern(Namespace::variables, var);
		a.type = table.intern(Namespace::types, "t");
		a.loc = {table.intern(Namespace::files, file), line, 0};
		entries.push_back(LogEntry{thread, hint, a});
		return *this;
	}

	Builder& repeat(std::size_t n, ThreadId thread, std::uint64_t address, const std::string& var, const std::string& file = "f.c", std::uint32_t line = 1, CacheHint hint = CacheHint::none, AccessKind kind = AccessKind::read)
	{
		for(std::size_t i = 0; i < n; ++i)
		{
			access(thread, address, var, file, line, hint, kind);
		}
		return *this;
	}
};

Report run(const std::string& kernel, const StringTable& table, const std::vector<LogEntry>& entries, KernelArgs args = {})
{
	auto k = make_kernel(kernel, table);
	k->configure(args);
	VectorSource src(entries);
	return run_offline(src, *k);
}

std::vector<LogEntry> scenario(StringTable& t, const std::string& name, std::map<std::string, std::int64_t> params, std::uint64_t seed = 1)
{
	return run_workload(WorkloadSpec{name, std::move(params), seed}, t);
}

} // namespace

TEST_CASE("registry")
{
	CHECK(kernel_names() == std::vector<std::string>{"access_counter", "cache_offenders", "shared_var_phase1", "shared_var_phase2", "struct_splitting"});
	const StringTable t;
	for(const auto& name : kernel_names())
	{
		CHECK(make_kernel(name, t)->name() == name);
	}
	try
	{
		make_kernel("nope", t);
		FAIL("expected UnknownKernel");
	}
	catch(const Error& e)
	{
		CHECK(e.code() == Errc::unknown_kernel);
		CHECK(std::string(e.what()).find("struct_splitting") != std::string::npos);
	}
}

TEST_CASE("access_counter")
{
	Builder b;
	b.repeat(3, 0, 0x10, "b").repeat(5, 1, 0x20, "a").repeat(3, 0, 0x30, "a2").repeat(3, 2, 0x40, "a1");
	const auto r = run("access_counter", b.table, b.entries);
	CHECK(r.columns() == std::vector<std::string>{"Variable", "Accesses"});
	CHECK(r.to_csv() == "Variable,Accesses\na,5\na1,3\na2,3\nb,3\n");
	CHECK(run("access_counter", b.table, {}).empty());

	StringTable t;
	const auto trace = scenario(t, "shared_counter", {{"threads", 8}, {"iters", 1000}});
	const auto sc = run("access_counter", t, trace);
	std::uint64_t total = 0;
	std::uint64_t accesses = 0;
	for(std::size_t i = 0; i < sc.size(); ++i)
	{
		total += sc.at(i, "Accesses").get<std::uint64_t>();
		if(sc.at(i, "Variable") == "stats.v")
		{
			CHECK(sc.at(i, "Accesses") == 8000);
		}
	}
	for(const auto& e : trace)
	{
		accesses += e.is_access() ? 1 : 0;
	}
	CHECK(total == accesses);
}

TEST_CASE("access_counter is additive over trace halves")
{
	StringTable t;
	const auto trace = scenario(t, "random_mix", {{"accesses", 6000}});
	const auto half = trace.begin() + static_cast<std::ptrdiff_t>(trace.size() / 2);
	auto sum = tracekit::testing::count_accesses_by_variable({trace.begin(), half}, t);
	for(const auto& [var, n] : tracekit::testing::count_accesses_by_variable({half, trace.end()}, t))
	{
		sum[var] += n;
	}
	const auto whole = run("access_counter", t, trace);
	std::map<std::string, std::uint64_t> got;
	for(std::size_t i = 0; i < whole.size(); ++i)
	{
		got[whole.at(i, "Variable").get<std::string>()] = whole.at(i, "Accesses").get<std::uint64_t>();
	}
	CHECK(got == sum);
}

TEST_CASE("cache_offenders ranking and ties")
{
	Builder b;
	b.repeat(4, 0, 0x10, "x", "a.c", 10, CacheHint::miss);
	b.repeat(2, 0, 0x10, "x", "a.c", 10, CacheHint::hit);
	b.repeat(4, 0, 0x20, "y", "a.c", 20, CacheHint::miss);
	b.repeat(1, 0, 0x20, "y", "a.c", 20, CacheHint::hit);
	b.repeat(4, 0, 0x30, "w", "b.c", 5, CacheHint::miss);
	b.repeat(2, 0, 0x30, "w", "b.c", 5, CacheHint::hit);
	b.repeat(9, 0, 0x40, "z", "b.c", 7, CacheHint::hit);
	const auto r = run("cache_offenders", b.table, b.entries);
	CHECK(r.columns() == std::vector<std::string>{"Variable Name", "File", "Line", "Miss count", "Access count"});
	CHECK(r.to_csv() ==
		"Variable Name,File,Line,Miss count,Access count\n"
		"w,b.c,5,4,6\n"
		"x,a.c,10,4,6\n"
		"y,a.c,20,4,5\n"
		"z,b.c,7,0,9\n");
	CHECK(run("cache_offenders", b.table, b.entries, {{"top", "2"}}).size() == 2);
	CHECK(code_of([&] { run("cache_offenders", b.table, b.entries, {{"limit", "2"}}); }) == Errc::config_error);
}

TEST_CASE("cache_offenders needs an annotated trace")
{
	Builder b;
	b.access(0, 0x10, "x", "a.c", 1, CacheHint::hit).access(0, 0x10, "x");
	CHECK(code_of([&] { run("cache_offenders", b.table, b.entries); }) == Errc::unannotated_trace);

	StringTable t;
	const auto trace = scenario(t, "shared_counter", {{"threads", 2}, {"iters", 5}});
	CHECK(code_of([&] { run("cache_offenders", t, trace); }) == Errc::unannotated_trace);
}

TEST_CASE("cache_offenders on aos_traversal with a tiny cache")
{
	StringTable t;
	const auto trace = scenario(t, "aos_traversal", {{"elems", 4096}, {"passes", 2}});
	const auto annotated = simulate(trace, CacheConfig{4096, 64, 4});
	const auto r = run("cache_offenders", t, annotated);
	const auto oracle = tracekit::testing::rank_offenders(tracekit::testing::reference_annotate(trace, 4096, 64, 4), t);
	REQUIRE(r.size() == oracle.size());
	for(std::size_t i = 0; i < oracle.size(); ++i)
	{
		CHECK(r.at(i, "Variable Name") == oracle[i].variable);
		CHECK(r.at(i, "File") == oracle[i].file);
		CHECK(r.at(i, "Line") == oracle[i].line);
		CHECK(r.at(i, "Miss count") == oracle[i].misses);
		CHECK(r.at(i, "Access count") == oracle[i].accesses);
		CHECK(oracle[i].misses <= oracle[i].accesses);
	}
	CHECK(r.at(0, "Variable Name") == "arc.ident");
	CHECK(r.at(0, "Line") == 167);
}

TEST_CASE("cache_offenders on a fully warm pass")
{
	StringTable t;
	const auto trace = scenario(t, "aos_traversal", {{"elems", 1024}, {"passes", 2}, {"match_pct", 30}});
	const auto annotated = simulate(trace, CacheConfig{});
	// keep only the second primal_bea_mpp call
	std::vector<LogEntry> second;
	int calls = 0;
	for(const auto& e : annotated)
	{
		if(const auto* f = e.function(); f && f->phase == FunctionPhase::entry && t.resolve(Namespace::functions, f->function) == "primal_bea_mpp")
		{
			++calls;
		}
		if(calls == 2 && e.is_access())
		{
			second.push_back(e);
		}
	}
	REQUIRE_FALSE(second.empty());
	const auto r = run("cache_offenders", t, second);
	for(std::size_t i = 0; i < r.size(); ++i)
	{
		CHECK(r.at(i, "Miss count") == 0);
		if(i > 0)
		{
			CHECK(r.at(i - 1, "Access count").get<std::uint64_t>() >= r.at(i, "Access count").get<std::uint64_t>());
		}
	}
	CHECK(r.at(0, "Variable Name") == "arc.ident");
}

TEST_CASE("field classification rule")
{
	const auto c = classify_fields({{"a", 1000}, {"b", 10}, {"c", 10}, {"d", 10}}, 2.0);
	REQUIRE(c.size() == 4);
	CHECK(c[0].hot);
	CHECK_FALSE(c[1].hot);
	CHECK_FALSE(c[2].hot);
	CHECK_FALSE(c[3].hot);

	// boundary: count == ratio * mean is hot
	const auto edge = classify_fields({{"a", 6}, {"b", 2}, {"c", 1}}, 2.0);
	CHECK(edge[0].hot);
	CHECK_FALSE(edge[1].hot);

	const auto flat = classify_fields({{"a", 5}, {"b", 5}}, 1.0);
	CHECK(flat[0].hot);
	CHECK(flat[1].hot);

	CHECK(is_live(10, 1000, 0.01));
	CHECK_FALSE(is_live(9, 1000, 0.01));
	CHECK_FALSE(is_live(0, 0, 0.0));
}

TEST_CASE("struct_splitting on handmade types")
{
	Builder b;
	b.repeat(1000, 0, 0x10, "S.a").repeat(10, 0, 0x18, "S.b").repeat(10, 0, 0x20, "S.c").repeat(10, 0, 0x28, "S.d");
	b.repeat(5, 0, 0x100, "Rare.x");
	b.repeat(50, 0, 0x200, "plain");
	const auto r = run("struct_splitting", b.table, b.entries);
	CHECK(r.columns() == std::vector<std::string>{"Type", "Field", "Access count", "Classification", "Type live"});
	CHECK(r.to_csv() ==
		"Type,Field,Access count,Classification,Type live\n"
		"S,a,1000,hot,true\n"
		"S,b,10,cold,true\n"
		"S,c,10,cold,true\n"
		"S,d,10,cold,true\n");
	REQUIRE(r.chart.has_value());
	const auto& chart = *r.chart;
	REQUIRE(chart.size() == 1);
	CHECK(chart[0]["type"] == "S");
	CHECK(chart[0]["fields"][0]["field"] == "a");
	CHECK(chart[0]["fields"][0]["weight"] == 1000);
	CHECK(chart[0]["fields"][0]["hot"] == true);
	CHECK(chart[0]["fields"][3]["hot"] == false);

	const auto lowered = run("struct_splitting", b.table, b.entries, {{"live_threshold", "0.001"}});
	CHECK(lowered.size() == 5);
	CHECK(lowered.at(4, "Type") == "Rare");

	// mean 257.5: 3.8 * mean = 978.5 <= 1000 < 1030 = 4 * mean
	CHECK(run("struct_splitting", b.table, b.entries, {{"hot_ratio", "3.8"}}).at(0, "Classification") == "hot");
	CHECK(run("struct_splitting", b.table, b.entries, {{"hot_ratio", "4"}}).at(0, "Classification") == "cold");

	CHECK(code_of([&] { run("struct_splitting", b.table, b.entries, {{"hot_ratio", "0"}}); }) == Errc::config_error);
	CHECK(code_of([&] { run("struct_splitting", b.table, b.entries, {{"live_threshold", "2"}}); }) == Errc::config_error);
	CHECK(run("struct_splitting", b.table, {}).empty());
}

TEST_CASE("struct_splitting on aos_traversal")
{
	StringTable t;
	const auto trace = scenario(t, "aos_traversal", {{"elems", 4096}, {"hot_field", 0}, {"match_pct", 10}});
	const auto r = run("struct_splitting", t, trace);
	REQUIRE(r.size() == 8);
	for(std::size_t i = 0; i < r.size(); ++i)
	{
		CHECK(r.at(i, "Type") == "arc");
		CHECK(r.at(i, "Type live") == true);
		CHECK(r.at(i, "Classification") == (r.at(i, "Field") == "ident" ? "hot" : "cold"));
	}
	CHECK(r.at(0, "Field") == "ident");
}

TEST_CASE("is_uniform examples")
{
	const std::uint64_t a[] = {100, 60, 3};
	const std::uint64_t b[] = {10, 4};
	const std::uint64_t c[] = {7, 7};
	const std::uint64_t d[] = {8, 4};
	const std::uint64_t unsorted[] = {3, 60, 100};
	const std::uint64_t huge[] = {~std::uint64_t{0}, ~std::uint64_t{0}};
	CHECK(is_uniform(a));
	CHECK_FALSE(is_uniform(b));
	CHECK(is_uniform(c));
	CHECK_FALSE(is_uniform(d));
	CHECK(is_uniform(unsorted));
	CHECK(is_uniform(huge));
	const std::uint64_t one[] = {5};
	CHECK(code_of([&] { is_uniform(one); }) == Errc::single_thread);
	CHECK(code_of([&] { is_uniform(std::span<const std::uint64_t>()); }) == Errc::single_thread);
}

TEST_CASE("thread histogram helpers")
{
	ThreadHistogram h;
	h.counts = {{0, 3}, {1, 9}, {2, 5}};
	CHECK(h.total() == 17);
	CHECK(h.sorted_counts() == std::vector<std::uint64_t>{9, 5, 3});
	CHECK(format_address(0x64D900) == "0x64D900");
	CHECK(format_address(0) == "0x0");
}

TEST_CASE("shared_var_phase1 on shared_counter")
{
	StringTable t;
	const auto trace = scenario(t, "shared_counter", {{"threads", 8}, {"iters", 1000}, {"noise", 1}});
	const auto r = run("shared_var_phase1", t, trace);
	CHECK(r.columns() == std::vector<std::string>{"Address", "#Accesses", "#Threads", "Variable"});
	REQUIRE(r.size() == 1);
	CHECK(r.at(0, "Variable") == "stats.v");
	CHECK(r.at(0, "#Threads") == 8);
	CHECK(r.at(0, "#Accesses") == 8000);
	CHECK(r.at(0, "Address") == format_address(EmulatedHeap::kBase));
}

TEST_CASE("shared_var_phase1 filters")
{
	Builder b;
	// single thread
	b.repeat(50, 0, 0x100, "solo");
	// non-uniform: 10 vs 4
	b.repeat(10, 0, 0x200, "skewed").repeat(4, 1, 0x200, "skewed");
	// uniform: 7 vs 7
	b.repeat(7, 0, 0x300, "even").repeat(7, 2, 0x300, "even");
	// uniform and bigger: 30, 20, 20
	b.repeat(30, 1, 0x400, "big").repeat(20, 2, 0x400, "big").repeat(20, 3, 0x400, "big");
	const auto r = run("shared_var_phase1", b.table, b.entries);
	CHECK(r.to_csv() == "Address,#Accesses,#Threads,Variable\n0x400,70,3,big\n0x300,14,2,even\n");

	Builder one;
	one.repeat(10, 0, 0x10, "a").repeat(10, 0, 0x20, "b");
	CHECK(run("shared_var_phase1", one.table, one.entries).empty());
}

TEST_CASE("shared_var_phase1 write filtering")
{
	Builder b;
	b.repeat(10, 0, 0x10, "v", "f.c", 1, CacheHint::none, AccessKind::write);
	b.repeat(10, 1, 0x10, "v", "f.c", 1, CacheHint::none, AccessKind::read);
	b.repeat(3, 1, 0x10, "v", "f.c", 1, CacheHint::none, AccessKind::write);
	CHECK(run("shared_var_phase1", b.table, b.entries).at(0, "#Accesses") == 23);
	// writes only: 10 vs 3 is not uniform
	CHECK(run("shared_var_phase1", b.table, b.entries, {{"writes_only", "true"}}).empty());
}

TEST_CASE("shared_var_phase1 filter soundness and conservation on random_mix")
{
	StringTable t;
	const auto trace = scenario(t, "random_mix", {{"threads", 6}, {"accesses", 30000}});
	std::map<std::uint64_t, std::map<ThreadId, std::uint64_t>> hist;
	for(const auto& e : trace)
	{
		if(const auto* a = e.access())
		{
			++hist[a->address][e.thread];
		}
	}
	auto phase1 = std::make_unique<SharedVarPhase1>(t);
	phase1->configure({});
	for(const auto& e : trace)
	{
		phase1->process(e);
	}
	const auto ranked = phase1->ranked();
	const auto r = phase1->finalize();
	REQUIRE(r.size() == ranked.size());
	std::size_t expected_rows = 0;
	for(const auto& [addr, per_thread] : hist)
	{
		if(per_thread.size() < 2)
		{
			continue;
		}
		std::vector<std::uint64_t> counts;
		for(const auto& [tid, n] : per_thread)
		{
			counts.push_back(n);
		}
		std::sort(counts.rbegin(), counts.rend());
		expected_rows += counts[0] < 2 * counts[1] ? 1 : 0;
	}
	CHECK(r.size() == expected_rows);
	for(std::size_t i = 0; i < ranked.size(); ++i)
	{
		const auto& h = ranked[i];
		CHECK(h.counts == hist.at(h.address));
		CHECK(h.counts.size() >= 2);
		const auto s = h.sorted_counts();
		CHECK(s[0] < 2 * s[1]);
		CHECK(r.at(i, "#Accesses") == h.total());
		if(i > 0)
		{
			CHECK(ranked[i - 1].total() >= h.total());
		}
	}
	CHECK(r.at(0, "Variable") == "stats.ops");
}

TEST_CASE("shared_var_phase2 on shared_counter")
{
	StringTable t;
	const auto trace = scenario(t, "shared_counter", {{"threads", 8}, {"iters", 1000}, {"noise", 1}});
	const auto r = run("shared_var_phase2", t, trace);
	CHECK(r.columns() == std::vector<std::string>{"threadcount", "totalcount", "threads", "file", "line", "variable"});
	REQUIRE(r.size() == 1);
	const auto doc = r.to_json();
	CHECK(doc[0]["threadcount"] == 8);
	CHECK(doc[0]["totalcount"] == 8000);
	CHECK(doc[0]["file"] == "shared_counter.c");
	CHECK(doc[0]["line"] == 31);
	CHECK(doc[0]["variable"] == "stats.v");
	REQUIRE(doc[0]["threads"].size() == 8);
	for(std::size_t i = 0; i < 8; ++i)
	{
		CHECK(doc[0]["threads"][i][0] == i);
		CHECK(doc[0]["threads"][i][1] == 1000);
	}

	const auto by_name = run("shared_var_phase2", t, trace, {{"target", "stats.v"}});
	CHECK(by_name == r);
	const auto by_addr = run("shared_var_phase2", t, trace, {{"address", format_address(EmulatedHeap::kBase)}});
	CHECK(by_addr == r);
}

TEST_CASE("shared_var_phase2 targets and errors")
{
	Builder b;
	b.repeat(6, 0, 0x10, "v", "a.c", 3).repeat(5, 1, 0x10, "v", "a.c", 3);
	b.repeat(2, 0, 0x10, "v", "b.c", 9).repeat(2, 2, 0x10, "v", "b.c", 9);
	b.repeat(4, 0, 0x20, "w", "a.c", 4).repeat(4, 1, 0x20, "w", "a.c", 4);
	b.repeat(9, 0, 0x30, "solo", "a.c", 5);

	const auto top = run("shared_var_phase2", b.table, b.entries);
	CHECK(top.to_csv() ==
		"threadcount,totalcount,threads,file,line,variable\n"
		"2,11,\"[[0,6],[1,5]]\",a.c,3,v\n"
		"2,4,\"[[0,2],[2,2]]\",b.c,9,v\n");

	const auto two = run("shared_var_phase2", b.table, b.entries, {{"top_k", "2"}});
	CHECK(two.size() == 3);

	const auto addrs = run("shared_var_phase2", b.table, b.entries, {{"address", "0x20,0x30"}});
	CHECK(addrs.size() == 2);
	CHECK(addrs.at(0, "variable") == "solo");

	CHECK(code_of([&] { run("shared_var_phase2", b.table, b.entries, {{"target", "missing"}}); }) == Errc::target_not_found);
	CHECK(code_of([&] { run("shared_var_phase2", b.table, b.entries, {{"address", "0x999"}}); }) == Errc::target_not_found);
	CHECK(code_of([&] { run("shared_var_phase2", b.table, b.entries, {{"address", "zz"}}); }) == Errc::config_error);
	CHECK(code_of([&] { run("shared_var_phase2", b.table, b.entries, {{"address", "0x1"}, {"target", "v"}}); }) == Errc::config_error);
	CHECK(code_of([&] { run("shared_var_phase2", b.table, b.entries, {{"top_k", "0"}}); }) == Errc::config_error);

	Builder solo;
	solo.repeat(9, 0, 0x30, "solo");
	CHECK(code_of([&] { run("shared_var_phase2", solo.table, solo.entries); }) == Errc::target_not_found);
}

TEST_CASE("phase 2 totals agree with phase 1")
{
	StringTable t;
	const auto trace = scenario(t, "random_mix", {{"threads", 4}, {"accesses", 20000}});
	const auto p1 = run("shared_var_phase1", t, trace);
	for(std::size_t i = 0; i < std::min<std::size_t>(p1.size(), 5); ++i)
	{
		const auto p2 = run("shared_var_phase2", t, trace, {{"address", p1.at(i, "Address").get<std::string>()}});
		std::uint64_t sum = 0;
		for(std::size_t j = 0; j < p2.size(); ++j)
		{
			sum += p2.at(j, "totalcount").get<std::uint64_t>();
			CHECK(p2.at(j, "threadcount") == p2.at(j, "threads").size());
		}
		CHECK(sum == p1.at(i, "#Accesses"));
	}
}
