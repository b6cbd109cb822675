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

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>

#include "tracekit/log_entry.hpp"
#include "tracekit/pipeline.hpp"
#include "tracekit/report.hpp"
#include "tracekit/string_table.hpp"
#include "tracekit/transport.hpp"

namespace tracekit {

using KernelArgs = std::map<std::string, std::string>;

/// Parses "k=v" into args; throws Errc::config_error without '='.
void add_kernel_arg(KernelArgs& args, std::string_view assignment);

/// Base class for analysis plugins. The host calls configure() once, then
/// process()/process_batch() for every entry in trace order, then
/// finalize() exactly once.
class AnalysisKernel
{
public:
	AnalysisKernel(std::string name, const StringTable& names);
	virtual ~AnalysisKernel() = default;

	AnalysisKernel(const AnalysisKernel&) = delete;
	AnalysisKernel& operator=(const AnalysisKernel&) = delete;

	const std::string& name() const { return m_name; }

	void configure(const KernelArgs& args);
	void process(const LogEntry& entry);
	void process_batch(std::span<const LogEntry> batch);

	/// Throws Errc::kernel_error when called a second time.
	Report finalize();
	bool finalized() const { return m_finalized; }

	/// Current partial result, for per-batch printing. Optional.
	virtual std::optional<Report> snapshot() const { return std::nullopt; }

protected:
	const StringTable& names() const { return m_names; }

	virtual void on_configure(const KernelArgs& args);
	virtual void on_entry(const LogEntry& entry) = 0;
	virtual void on_batch(std::span<const LogEntry> batch);
	virtual Report on_finalize() = 0;

private:
	void check_open() const;

	std::string m_name;
	const StringTable& m_names;
	bool m_finalized = false;
};

/// Typed access to kernel arguments. finish() rejects keys nobody asked for.
class ArgReader
{
public:
	ArgReader(const KernelArgs& args, std::string kernel) : m_args(args), m_kernel(std::move(kernel)) {}

	std::string get_string(const std::string& key, const std::string& fallback);
	double get_double(const std::string& key, double fallback);
	std::uint64_t get_uint(const std::string& key, std::uint64_t fallback);
	bool get_bool(const std::string& key, bool fallback);
	bool has(const std::string& key) const { return m_args.count(key) != 0; }
	void finish() const;

private:
	const std::string* raw(const std::string& key);

	const KernelArgs& m_args;
	std::string m_kernel;
	std::set<std::string> m_seen;
};

/// Feeds every entry to the kernel in order and returns its final report.
/// Source errors propagate; foreign exceptions from the kernel are rethrown
/// as Errc::kernel_error with the entry index.
Report run_offline(EntrySource& source, AnalysisKernel& kernel);

struct BatchingPolicy
{
	enum class Mode
	{
		whole_trace,
		by_count,
		by_duration,
	};

	Mode mode = Mode::whole_trace;
	std::size_t count = 0;
	std::chrono::milliseconds duration{0};

	static BatchingPolicy whole_trace() { return {}; }
	static BatchingPolicy by_count(std::size_t n);
	static BatchingPolicy by_duration(std::chrono::milliseconds d);

	/// "whole", "count:N" or "duration:MS". Throws Errc::config_error.
	static BatchingPolicy parse(std::string_view text);
	std::string to_string() const;
};

struct BatchInfo
{
	std::size_t index = 0;
	std::size_t size = 0;
	std::size_t entries_so_far = 0;
};

using SnapshotHook = std::function<void(const BatchInfo&, const AnalysisKernel&)>;

/// Groups the stream into micro-batches per policy and hands each batch to
/// the kernel. A timeslice closes on the first arrival past its deadline or
/// at end of stream. End of stream finalizes the kernel. The report equals
/// run_offline's for the same entries.
Report run_streaming(EntrySource& source, AnalysisKernel& kernel, const BatchingPolicy& policy, const SnapshotHook& hook = {});

/// Accepts one connection on listener and streams it.
Report run_streaming(TcpListener& listener, AnalysisKernel& kernel, const BatchingPolicy& policy, const SnapshotHook& hook = {});

template<typename K, typename V>
using KeyedState = std::map<K, V>;

/// state'[k] = combine(state[k], fold of the batch values mapped to k).
/// key_fn maps a record to an optional (key, value); nullopt drops it.
/// combine must be associative and commutative.
template<typename K, typename V, typename Record, typename KeyFn, typename Combine>
KeyedState<K, V> keyed_update(KeyedState<K, V> state, std::span<const Record> batch, KeyFn&& key_fn, Combine&& combine)
{
	KeyedState<K, V> reduced;
	for(const auto& record : batch)
	{
		std::optional<std::pair<K, V>> kv = key_fn(record);
		if(!kv)
		{
			continue;
		}
		auto [it, inserted] = reduced.try_emplace(std::move(kv->first), kv->second);
		if(!inserted)
		{
			it->second = combine(it->second, kv->second);
		}
	}
	for(auto& [key, value] : reduced)
	{
		auto [it, inserted] = state.try_emplace(key, value);
		if(!inserted)
		{
			it->second = combine(it->second, value);
		}
	}
	return state;
}

/// Pipeline terminal running a kernel over its input.
class KernelStage : public Stage
{
public:
	explicit KernelStage(AnalysisKernel& kernel, BatchingPolicy policy = BatchingPolicy::whole_trace());

	std::string name() const override { return "analyze " + m_kernel.name(); }
	StreamKind input() const override { return StreamKind::binary; }
	StreamKind output() const override { return StreamKind::none; }
	std::unique_ptr<EntrySource> bind(std::unique_ptr<EntrySource> upstream) override;

	/// Available once the pipeline has run.
	const std::optional<Report>& report() const { return *m_report; }

private:
	AnalysisKernel& m_kernel;
	BatchingPolicy m_policy;
	std::shared_ptr<std::optional<Report>> m_report;
};

} // namespace tracekit
