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

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "tracekit/cache.hpp"
#include "tracekit/error.hpp"
#include "tracekit/kernels.hpp"
#include "tracekit/text_codec.hpp"
#include "tracekit/transport.hpp"
#include "tracekit/workload.hpp"

using namespace tracekit;
using namespace tracekit::testing;

namespace {

/// Collects the first few failure messages of one criterion.
class Verdict
{
public:
	void expect(bool ok, const std::string& what)
	{
		if(!ok)
		{
			++m_failures;
			if(m_messages.size() < 5)
			{
				m_messages.push_back(what);
			}
		}
	}

	bool ok() const { return m_failures == 0; }

	std::string summary() const
	{
		std::string s = std::to_string(m_failures) + " failed check(s)";
		for(const auto& m : m_messages)
		{
			s += "; " + m;
		}
		return s;
	}

private:
	std::size_t m_failures = 0;
	std::vector<std::string> m_messages;
};

std::vector<LogEntry> scenario(StringTable& t, const std::string& name, std::map<std::string, std::int64_t> params, std::uint64_t seed = 1)
{
	return run_workload(WorkloadSpec{name, std::move(params), seed}, t);
}

Report run_kernel(const std::string& kernel, const StringTable& t, const std::vector<LogEntry>& trace, const BatchingPolicy& policy = BatchingPolicy::whole_trace(), const KernelArgs& args = {})
{
	auto k = make_kernel(kernel, t);
	k->configure(args);
	VectorSource source(trace);
	return run_streaming(source, *k, policy);
}

std::uint64_t count_misses(const std::vector<LogEntry>& annotated)
{
	return static_cast<std::uint64_t>(std::count_if(annotated.begin(), annotated.end(), [](const LogEntry& e) { return e.is_access() && e.hint == CacheHint::miss; }));
}

void codec_soundness(Verdict& v)
{
	std::mt19937_64 rng(20261015);
	const StringTable table = random_table(rng, 12);
	constexpr std::size_t n = 100000;
	std::vector<LogEntry> entries;
	entries.reserve(n);
	for(std::size_t i = 0; i < n; ++i)
	{
		entries.push_back(random_entry(rng, table));
	}
	std::size_t binary_bad = 0;
	std::size_t text_bad = 0;
	for(const auto& e : entries)
	{
		const auto block = encode_binary(e);
		binary_bad += decode_binary(block) == e ? 0 : 1;
		const auto line = encode_text(e, table);
		text_bad += decode_text(line, table) == e ? 0 : 1;
	}
	v.expect(binary_bad == 0, std::to_string(binary_bad) + " binary round-trip mismatches");
	v.expect(text_bad == 0, std::to_string(text_bad) + " text round-trip mismatches");

	TempDir dir;
	for(const std::size_t count : {std::size_t{0}, std::size_t{1}, std::size_t{4097}, n})
	{
		const std::vector<LogEntry> part(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(count));
		const auto bin = dir / "t.bin";
		write_trace(bin, part, TraceFormat::binary);
		const auto size = std::filesystem::file_size(bin);
		v.expect(size == 48 * count, "file of " + std::to_string(count) + " entries has " + std::to_string(size) + " bytes");
		v.expect(read_trace(bin, TraceFormat::binary) == part, "binary file round trip differs for " + std::to_string(count) + " entries");
		const auto txt = dir / "t.txt";
		write_trace(txt, part, TraceFormat::text, &table);
		v.expect(read_trace(txt, TraceFormat::text, &table) == part, "text file round trip differs for " + std::to_string(count) + " entries");
	}
}

CacheConfig random_geometry(std::mt19937_64& rng)
{
	const std::uint64_t lines[] = {16, 32, 64, 128};
	const std::uint64_t ways[] = {0, 1, 2, 3, 4, 8, 16};
	CacheConfig c;
	c.line_bytes = lines[rng() % 4];
	c.associativity = ways[rng() % 7];
	if(c.associativity == CacheConfig::kFullyAssociative)
	{
		c.capacity_bytes = c.line_bytes * (1 + rng() % 300);
	}
	else
	{
		const std::uint64_t sets = std::uint64_t{1} << (rng() % 8);
		c.capacity_bytes = c.line_bytes * c.associativity * sets;
	}
	c.validate();
	return c;
}

void cache_oracle(Verdict& v)
{
	std::mt19937_64 rng(77);
	for(int pair = 0; pair < 20; ++pair)
	{
		const auto cfg = random_geometry(rng);
		const std::uint64_t span = cfg.capacity_bytes * (1 + rng() % 8);
		const auto trace = random_access_trace(rng, 10000, span);
		CacheState fast(cfg);
		ReferenceCache slow(cfg.capacity_bytes, cfg.line_bytes, cfg.associativity);
		std::size_t mismatches = 0;
		for(const auto& e : trace)
		{
			const auto address = e.access()->address;
			mismatches += fast.access(address) == slow.access(address) ? 0 : 1;
		}
		const auto annotated = simulate(trace, cfg);
		const auto expected = reference_annotate(trace, cfg.capacity_bytes, cfg.line_bytes, cfg.associativity);
		mismatches += annotated == expected ? 0 : 1;
		v.expect(mismatches == 0, "config " + cfg.to_json().dump() + ": " + std::to_string(mismatches) + " mismatches");
	}
}

void lru_inclusion(Verdict& v)
{
	std::mt19937_64 rng(4242);
	const std::uint64_t capacities[] = {2048, 8192, 32768, 131072};
	for(int t = 0; t < 10; ++t)
	{
		const auto trace = random_access_trace(rng, 20000, 1 << 18);
		std::uint64_t previous = ~std::uint64_t{0};
		for(const auto capacity : capacities)
		{
			CacheConfig cfg{capacity, 64, CacheConfig::kFullyAssociative};
			CacheState state(cfg);
			for(const auto& e : trace)
			{
				state.access(e.access()->address);
			}
			v.expect(state.misses() <= previous, "trace " + std::to_string(t) + ": " + std::to_string(state.misses()) + " misses at " + std::to_string(capacity) + " bytes after " + std::to_string(previous));
			previous = state.misses();
		}
	}
}

std::unique_ptr<Stage> kernel_tail(std::vector<std::unique_ptr<Stage>>& stages, AnalysisKernel& kernel, bool needs_annotation)
{
	if(needs_annotation)
	{
		stages.push_back(std::make_unique<SimulateStage>(CacheConfig{}));
	}
	return std::make_unique<KernelStage>(kernel);
}

Report file_route(const std::string& name, const StringTable& t, const std::filesystem::path& path)
{
	auto kernel = make_kernel(name, t);
	kernel->configure({});
	std::vector<std::unique_ptr<Stage>> stages;
	stages.push_back(std::make_unique<FileSourceStage>(path, TraceFormat::binary));
	auto tail = kernel_tail(stages, *kernel, name == CacheOffenders::kName);
	auto* ks = static_cast<KernelStage*>(tail.get());
	stages.push_back(std::move(tail));
	auto pipeline = Pipeline::chain(std::move(stages));
	pipeline.run();
	return *ks->report();
}

Report socket_route(const std::string& name, const StringTable& t, const std::filesystem::path& path, std::size_t buffer)
{
	auto listener = TcpListener::bind(Endpoint{"127.0.0.1", 0});
	auto kernel = make_kernel(name, t);
	kernel->configure({});
	std::vector<std::unique_ptr<Stage>> stages;
	stages.push_back(std::make_unique<SocketSourceStage>(listener));
	auto tail = kernel_tail(stages, *kernel, name == CacheOffenders::kName);
	auto* ks = static_cast<KernelStage*>(tail.get());
	stages.push_back(std::move(tail));
	auto pipeline = Pipeline::chain(std::move(stages));
	const auto endpoint = listener.endpoint();
	std::thread producer([&] {
		auto source = open_trace(path, TraceFormat::binary);
		serve_trace(*source, endpoint, std::chrono::milliseconds{5000}, buffer);
	});
	try
	{
		pipeline.run();
	}
	catch(...)
	{
		producer.join();
		throw;
	}
	producer.join();
	return *ks->report();
}

void transport_neutrality(Verdict& v)
{
	StringTable t;
	auto trace = scenario(t, "random_mix", {{"accesses", 20000}, {"threads", 4}}, 9);
	const auto sc = scenario(t, "shared_counter", {{"threads", 4}, {"iters", 300}}, 9);
	TempDir dir;

	std::string reference_bytes;
	for(const std::size_t buffer : {std::size_t{1}, std::size_t{7}, std::size_t{4096}})
	{
		const auto path = dir / ("b" + std::to_string(buffer) + ".bin");
		write_trace(path, trace, TraceFormat::binary, nullptr, buffer);
		const auto bytes = read_file(path);
		if(reference_bytes.empty())
		{
			reference_bytes = bytes;
		}
		v.expect(bytes == reference_bytes, "buffer " + std::to_string(buffer) + " changes the file bytes");

		auto listener = TcpListener::bind(Endpoint{"127.0.0.1", 0});
		std::vector<LogEntry> received;
		std::thread receiver([&] { received = receive_trace(listener); });
		VectorSource source(trace);
		serve_trace(source, listener.endpoint(), std::chrono::milliseconds{5000}, buffer);
		receiver.join();
		v.expect(received == trace, "buffer " + std::to_string(buffer) + " changes the socket stream");
	}
	const auto text_a = dir / "a.txt";
	const auto text_b = dir / "b.txt";
	write_trace(text_a, trace, TraceFormat::text, &t, 1);
	write_trace(text_b, trace, TraceFormat::text, &t, 4096);
	v.expect(read_file(text_a) == read_file(text_b), "buffer size changes text files");

	const auto path = dir / "b4096.bin";
	const auto sc_path = dir / "sc.bin";
	write_trace(sc_path, sc, TraceFormat::binary);
	for(const auto& name : kernel_names())
	{
		for(const auto& p : {path, sc_path})
		{
			const auto by_file = file_route(name, t, p);
			for(const std::size_t buffer : {std::size_t{1}, std::size_t{4096}})
			{
				const auto by_socket = socket_route(name, t, p, buffer);
				v.expect(by_file.to_csv() == by_socket.to_csv(), name + ": CSV differs between file and socket routes");
				v.expect(by_file.to_json_text() == by_socket.to_json_text(), name + ": JSON differs between file and socket routes");
			}
			v.expect(!by_file.empty(), name + ": empty report on " + p.filename().string());
		}
	}
}

void batch_invariance(Verdict& v)
{
	StringTable t;
	auto trace = simulate(scenario(t, "random_mix", {{"accesses", 100000}, {"threads", 6}}, 5), CacheConfig{32768, 64, 8});
	v.expect(trace.size() >= 100000, "trace has only " + std::to_string(trace.size()) + " entries");
	const std::vector<BatchingPolicy> policies = {BatchingPolicy::by_count(1), BatchingPolicy::by_count(100), BatchingPolicy::by_count(4096)};
	for(const auto& name : kernel_names())
	{
		const auto whole = run_kernel(name, t, trace);
		v.expect(!whole.empty(), name + ": empty report");
		for(const auto& policy : policies)
		{
			const auto batched = run_kernel(name, t, trace, policy);
			v.expect(batched == whole, name + ": " + policy.to_string() + " differs from whole trace");
			v.expect(batched.to_csv() == whole.to_csv() && batched.to_json_text() == whole.to_json_text(), name + ": serialized output differs under " + policy.to_string());
		}
	}
}

void shared_variable_tool(Verdict& v)
{
	StringTable t;
	const auto trace = scenario(t, "shared_counter", {{"threads", 8}, {"iters", 1000}, {"noise", 1}});

	// Direct histograms from the raw trace.
	std::map<std::uint64_t, std::map<ThreadId, std::uint64_t>> hist;
	std::map<std::uint64_t, std::set<std::pair<std::string, std::uint32_t>>> sites;
	std::map<std::uint64_t, std::string> var_at;
	for(const auto& e : trace)
	{
		if(const auto* a = e.access())
		{
			++hist[a->address][e.thread];
			sites[a->address].insert({t.resolve(Namespace::files, a->loc.file), a->loc.line});
			var_at[a->address] = t.resolve(Namespace::variables, a->variable);
		}
	}
	std::uint64_t counter = 0;
	std::uint64_t best = 0;
	std::set<std::uint64_t> private_addresses;
	for(const auto& [addr, per_thread] : hist)
	{
		if(per_thread.size() == 1)
		{
			private_addresses.insert(addr);
		}
		std::uint64_t total = 0;
		for(const auto& [tid, n] : per_thread)
		{
			total += n;
		}
		if(total > best)
		{
			best = total;
			counter = addr;
		}
	}
	v.expect(!private_addresses.empty(), "noise produced no private addresses");
	std::vector<std::uint64_t> counts;
	for(const auto& [tid, n] : hist[counter])
	{
		counts.push_back(n);
	}
	std::sort(counts.rbegin(), counts.rend());
	v.expect(counts.size() == 8 && counts[0] < 2 * counts[1], "counter histogram is not uniform by direct evaluation");
	v.expect(is_uniform(counts), "is_uniform rejects the counter histogram");

	const auto p1 = run_kernel(SharedVarPhase1::kName, t, trace);
	v.expect(!p1.empty(), "phase 1 report is empty");
	if(!p1.empty())
	{
		v.expect(p1.at(0, "Address") == format_address(counter), "phase 1 top address is not the counter");
		v.expect(p1.at(0, "Variable") == var_at[counter], "phase 1 top variable is not the counter");
		v.expect(p1.at(0, "#Threads") == 8, "phase 1 top row does not have 8 threads");
		v.expect(p1.at(0, "#Accesses") == 8000, "phase 1 top row does not have 8000 accesses");
	}
	for(std::size_t i = 0; i < p1.size(); ++i)
	{
		for(const auto addr : private_addresses)
		{
			v.expect(p1.at(i, "Address") != format_address(addr), "private address " + format_address(addr) + " was reported");
		}
	}

	const auto p2 = run_kernel(SharedVarPhase2::kName, t, trace).to_json();
	v.expect(sites[counter].size() == 1, "the counter is touched from more than one source line");
	v.expect(p2.size() == 1, "phase 2 reports " + std::to_string(p2.size()) + " locations");
	if(p2.size() == 1 && sites[counter].size() == 1)
	{
		const auto& row = p2[0];
		v.expect(row["threadcount"] == 8, "phase 2 threadcount is not 8");
		v.expect(row["totalcount"] == 8000, "phase 2 totalcount is not 8000");
		v.expect(row["file"] == sites[counter].begin()->first, "phase 2 file differs from the increment site");
		v.expect(row["line"] == sites[counter].begin()->second, "phase 2 line differs from the increment site");
		v.expect(row["variable"] == var_at[counter], "phase 2 variable differs");
		bool pairs_ok = row["threads"].size() == 8;
		for(std::size_t i = 0; pairs_ok && i < 8; ++i)
		{
			pairs_ok = row["threads"][i][0] == i && row["threads"][i][1] == 1000;
		}
		v.expect(pairs_ok, "phase 2 per-thread pairs are not (tid, 1000)");
	}
}

void cache_offender_tool(Verdict& v)
{
	StringTable t;
	const auto trace = scenario(t, "aos_traversal", {{"elems", 4096}, {"fields", 8}, {"match_pct", 10}});
	const CacheConfig cfg{32768, 64, 8};
	std::uint64_t footprint = 0;
	for(const auto& e : trace)
	{
		if(const auto* a = e.allocation())
		{
			footprint += a->size_bytes();
		}
	}
	v.expect(footprint >= 8 * cfg.capacity_bytes, "footprint " + std::to_string(footprint) + " is not much larger than the cache");

	const auto annotated = simulate(trace, cfg);
	const auto oracle = rank_offenders(reference_annotate(trace, cfg.capacity_bytes, cfg.line_bytes, cfg.associativity), t);
	const auto report = run_kernel(CacheOffenders::kName, t, annotated);
	v.expect(report.size() == oracle.size(), "row count differs from the oracle");
	for(std::size_t i = 0; i < std::min(report.size(), oracle.size()); ++i)
	{
		const auto& o = oracle[i];
		const bool same = report.at(i, "Variable Name") == o.variable && report.at(i, "File") == o.file && report.at(i, "Line") == o.line && report.at(i, "Miss count") == o.misses && report.at(i, "Access count") == o.accesses;
		v.expect(same, "row " + std::to_string(i) + " differs from the oracle (" + o.variable + ")");
	}
	if(!oracle.empty())
	{
		v.expect(oracle[0].variable == "arc.ident" && oracle[0].line == 167, "oracle top offender is " + oracle[0].variable + ":" + std::to_string(oracle[0].line));
		v.expect(oracle.size() < 2 || oracle[0].misses > oracle[1].misses, "hot field does not strictly lead");
	}
}

void struct_splitting_tool(Verdict& v)
{
	StringTable t;
	const auto trace = scenario(t, "aos_traversal", {{"elems", 4096}, {"fields", 8}, {"match_pct", 10}});
	const auto r = run_kernel(StructSplitting::kName, t, trace);
	v.expect(r.size() == 8, "expected 8 field rows, got " + std::to_string(r.size()));
	bool saw_hot = false;
	for(std::size_t i = 0; i < r.size(); ++i)
	{
		const bool is_hot_field = r.at(i, "Field") == "ident";
		saw_hot = saw_hot || is_hot_field;
		v.expect(r.at(i, "Type") == "arc", "unexpected type row");
		v.expect(r.at(i, "Type live") == true, "type arc is not live");
		v.expect(r.at(i, "Classification") == (is_hot_field ? "hot" : "cold"), "field " + r.at(i, "Field").get<std::string>() + " misclassified");
	}
	v.expect(saw_hot, "hot field missing");

	StringTable lt;
	const CacheConfig defaults;
	const auto fat = count_misses(simulate(scenario(lt, "linked_cells", {{"layout", 0}}), defaults));
	const auto split = count_misses(simulate(scenario(lt, "linked_cells", {{"layout", 1}}), defaults));
	v.expect(split < fat, "split layout misses " + std::to_string(split) + " vs fat " + std::to_string(fat));
}

void uniformity_formula(Verdict& v)
{
	std::size_t cases = 0;
	for(std::size_t size = 0; size <= 4; ++size)
	{
		std::vector<std::uint64_t> counts(size, 0);
		while(true)
		{
			++cases;
			if(size < 2)
			{
				bool threw = false;
				try
				{
					is_uniform(counts);
				}
				catch(const Error& e)
				{
					threw = e.code() == Errc::single_thread;
				}
				v.expect(threw, "histogram of size " + std::to_string(size) + " did not raise SingleThread");
			}
			else
			{
				auto sorted = counts;
				std::sort(sorted.begin(), sorted.end(), std::greater<>());
				const bool direct = sorted[0] < 2 * sorted[1];
				v.expect(is_uniform(counts) == direct, "mismatch on a histogram of size " + std::to_string(size));
			}
			std::size_t i = 0;
			while(i < size && counts[i] == 8)
			{
				counts[i++] = 0;
			}
			if(i == size)
			{
				break;
			}
			++counts[i];
		}
	}
	v.expect(cases == 1 + 9 + 81 + 729 + 6561, "enumerated " + std::to_string(cases) + " histograms");
}

struct Criterion
{
	int id;
	const char* title;
	double limit_seconds; // 0 = no bound
	std::function<void(Verdict&)> body;
};

} // namespace

int main()
{
	const std::vector<Criterion> criteria = {
		{1, "codec round trip and 48-byte entries", 10, codec_soundness},
		{2, "cache simulator matches the reference model", 30, cache_oracle},
		{3, "LRU inclusion across capacities", 10, lru_inclusion},
		{4, "file and socket routes are interchangeable", 0, transport_neutrality},
		{5, "batching does not change reports", 0, batch_invariance},
		{6, "shared counter found by both sharing phases", 0, shared_variable_tool},
		{7, "hot field tops the cache offender ranking", 0, cache_offender_tool},
		{8, "hot/cold split and split layout miss reduction", 0, struct_splitting_tool},
		{9, "uniform sharing rule, exhaustive", 0, uniformity_formula},
	};
	int failed = 0;
	for(const auto& c : criteria)
	{
		Verdict v;
		const auto start = std::chrono::steady_clock::now();
		try
		{
			c.body(v);
		}
		catch(const std::exception& e)
		{
			v.expect(false, std::string("exception: ") + e.what());
		}
		const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
		if(c.limit_seconds > 0)
		{
			char buf[64];
			std::snprintf(buf, sizeof buf, "took %.2f s, limit %.0f s", seconds, c.limit_seconds);
			v.expect(seconds < c.limit_seconds, buf);
		}
		std::printf("%s %d %s (%.2f s)%s%s\n", v.ok() ? "PASS" : "FAIL", c.id, c.title, seconds, v.ok() ? "" : ": ", v.ok() ? "" : v.summary().c_str());
		std::fflush(stdout);
		failed += v.ok() ? 0 : 1;
	}
	std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
	return failed == 0 ? 0 : 1;
}
