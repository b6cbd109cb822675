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

#include "tracekit/engine.hpp"

#include <charconv>
#include <vector>

#include "tracekit/error.hpp"

namespace tracekit {

namespace {

template<typename Fn>
void guarded(const AnalysisKernel& kernel, std::size_t entry_index, Fn&& fn)
{
	try
	{
		fn();
	}
	catch(const Error&)
	{
		throw;
	}
	catch(const std::exception& e)
	{
		fail(Errc::kernel_error, kernel.name() + " failed near entry " + std::to_string(entry_index) + ": " + e.what());
	}
}

Report finalize_guarded(AnalysisKernel& kernel, std::size_t entries)
{
	Report report;
	guarded(kernel, entries, [&] { report = kernel.finalize(); });
	return report;
}

std::uint64_t parse_uint(std::string_view text, const std::string& what)
{
	std::uint64_t value = 0;
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	if(text.empty() || ec != std::errc() || ptr != text.data() + text.size())
	{
		fail(Errc::config_error, what + " \"" + std::string(text) + "\" is not a non-negative integer");
	}
	return value;
}

/// Pushes entries through the kernel in policy-sized batches.
class Batcher
{
public:
	Batcher(AnalysisKernel& kernel, const BatchingPolicy& policy, const SnapshotHook& hook) :
		m_kernel(kernel), m_policy(policy), m_hook(hook)
	{
	}

	void add(LogEntry entry)
	{
		using Mode = BatchingPolicy::Mode;
		if(m_policy.mode == Mode::by_duration)
		{
			const auto now = std::chrono::steady_clock::now();
			if(!m_slice_end)
			{
				m_slice_end = now + m_policy.duration;
			}
			else if(now >= *m_slice_end)
			{
				flush();
				while(*m_slice_end <= now)
				{
					*m_slice_end += m_policy.duration;
				}
			}
		}
		m_batch.push_back(std::move(entry));
		if(m_policy.mode == Mode::by_count && m_batch.size() >= m_policy.count)
		{
			flush();
		}
	}

	void flush()
	{
		if(m_batch.empty())
		{
			return;
		}
		guarded(m_kernel, m_seen, [&] { m_kernel.process_batch(m_batch); });
		m_seen += m_batch.size();
		if(m_hook)
		{
			m_hook(BatchInfo{m_index, m_batch.size(), m_seen}, m_kernel);
		}
		++m_index;
		m_batch.clear();
	}

	std::size_t seen() const { return m_seen; }

private:
	AnalysisKernel& m_kernel;
	const BatchingPolicy& m_policy;
	const SnapshotHook& m_hook;
	std::vector<LogEntry> m_batch;
	std::optional<std::chrono::steady_clock::time_point> m_slice_end;
	std::size_t m_index = 0;
	std::size_t m_seen = 0;
};

/// Terminal source for KernelStage: runs the kernel to completion on the
/// first pull and then reports end of stream.
class KernelDrain : public EntrySource
{
public:
	KernelDrain(std::unique_ptr<EntrySource> upstream, AnalysisKernel& kernel, BatchingPolicy policy, std::shared_ptr<std::optional<Report>> slot) :
		m_upstream(std::move(upstream)), m_kernel(kernel), m_policy(policy), m_slot(std::move(slot))
	{
	}

	std::optional<LogEntry> next() override
	{
		if(!m_done)
		{
			m_done = true;
			*m_slot = m_policy.mode == BatchingPolicy::Mode::whole_trace ? run_offline(*m_upstream, m_kernel) : run_streaming(*m_upstream, m_kernel, m_policy);
		}
		return std::nullopt;
	}

private:
	std::unique_ptr<EntrySource> m_upstream;
	AnalysisKernel& m_kernel;
	BatchingPolicy m_policy;
	std::shared_ptr<std::optional<Report>> m_slot;
	bool m_done = false;
};

} // namespace

void add_kernel_arg(KernelArgs& args, std::string_view assignment)
{
	const auto eq = assignment.find('=');
	if(eq == std::string_view::npos || eq == 0)
	{
		fail(Errc::config_error, "kernel argument \"" + std::string(assignment) + "\" is not key=value");
	}
	args[std::string(assignment.substr(0, eq))] = std::string(assignment.substr(eq + 1));
}

AnalysisKernel::AnalysisKernel(std::string name, const StringTable& names) :
	m_name(std::move(name)), m_names(names)
{
}

void AnalysisKernel::check_open() const
{
	if(m_finalized)
	{
		fail(Errc::kernel_error, m_name + " used after finalize");
	}
}

void AnalysisKernel::configure(const KernelArgs& args)
{
	check_open();
	on_configure(args);
}

void AnalysisKernel::on_configure(const KernelArgs& args)
{
	ArgReader(args, m_name).finish();
}

void AnalysisKernel::process(const LogEntry& entry)
{
	check_open();
	on_entry(entry);
}

void AnalysisKernel::process_batch(std::span<const LogEntry> batch)
{
	check_open();
	on_batch(batch);
}

void AnalysisKernel::on_batch(std::span<const LogEntry> batch)
{
	for(const auto& e : batch)
	{
		on_entry(e);
	}
}

Report AnalysisKernel::finalize()
{
	check_open();
	m_finalized = true;
	return on_finalize();
}

const std::string* ArgReader::raw(const std::string& key)
{
	m_seen.insert(key);
	auto it = m_args.find(key);
	return it == m_args.end() ? nullptr : &it->second;
}

std::string ArgReader::get_string(const std::string& key, const std::string& fallback)
{
	const auto* v = raw(key);
	return v ? *v : fallback;
}

double ArgReader::get_double(const std::string& key, double fallback)
{
	const auto* v = raw(key);
	if(!v)
	{
		return fallback;
	}
	try
	{
		std::size_t used = 0;
		const double d = std::stod(*v, &used);
		if(used == v->size())
		{
			return d;
		}
	}
	catch(const std::exception&)
	{
	}
	fail(Errc::config_error, m_kernel + ": argument " + key + "=\"" + *v + "\" is not a number");
}

std::uint64_t ArgReader::get_uint(const std::string& key, std::uint64_t fallback)
{
	const auto* v = raw(key);
	return v ? parse_uint(*v, m_kernel + ": argument " + key) : fallback;
}

bool ArgReader::get_bool(const std::string& key, bool fallback)
{
	const auto* v = raw(key);
	if(!v)
	{
		return fallback;
	}
	if(*v == "1" || *v == "true" || *v == "yes" || v->empty())
	{
		return true;
	}
	if(*v == "0" || *v == "false" || *v == "no")
	{
		return false;
	}
	fail(Errc::config_error, m_kernel + ": argument " + key + "=\"" + *v + "\" is not a boolean");
}

void ArgReader::finish() const
{
	for(const auto& [key, value] : m_args)
	{
		if(!m_seen.count(key))
		{
			fail(Errc::config_error, m_kernel + " does not take argument \"" + key + "\"");
		}
	}
}

Report run_offline(EntrySource& source, AnalysisKernel& kernel)
{
	std::size_t index = 0;
	while(auto e = source.next())
	{
		guarded(kernel, index, [&] { kernel.process(*e); });
		++index;
	}
	return finalize_guarded(kernel, index);
}

BatchingPolicy BatchingPolicy::by_count(std::size_t n)
{
	if(n < 1)
	{
		fail(Errc::config_error, "batch count must be >= 1");
	}
	BatchingPolicy p;
	p.mode = Mode::by_count;
	p.count = n;
	return p;
}

BatchingPolicy BatchingPolicy::by_duration(std::chrono::milliseconds d)
{
	if(d.count() < 1)
	{
		fail(Errc::config_error, "batch duration must be >= 1 ms");
	}
	BatchingPolicy p;
	p.mode = Mode::by_duration;
	p.duration = d;
	return p;
}

BatchingPolicy BatchingPolicy::parse(std::string_view text)
{
	if(text == "whole")
	{
		return whole_trace();
	}
	if(text.rfind("count:", 0) == 0)
	{
		return by_count(parse_uint(text.substr(6), "batch count"));
	}
	if(text.rfind("duration:", 0) == 0)
	{
		return by_duration(std::chrono::milliseconds(parse_uint(text.substr(9), "batch duration")));
	}
	fail(Errc::config_error, "batch policy \"" + std::string(text) + "\" is not whole, count:N or duration:MS");
}

std::string BatchingPolicy::to_string() const
{
	switch(mode)
	{
	case Mode::whole_trace: return "whole";
	case Mode::by_count: return "count:" + std::to_string(count);
	case Mode::by_duration: return "duration:" + std::to_string(duration.count());
	}
	return "?";
}

Report run_streaming(EntrySource& source, AnalysisKernel& kernel, const BatchingPolicy& policy, const SnapshotHook& hook)
{
	if(policy.mode == BatchingPolicy::Mode::by_count && policy.count < 1)
	{
		fail(Errc::config_error, "batch count must be >= 1");
	}
	if(policy.mode == BatchingPolicy::Mode::by_duration && policy.duration.count() < 1)
	{
		fail(Errc::config_error, "batch duration must be >= 1 ms");
	}

	Batcher batcher(kernel, policy, hook);
	try
	{
		while(auto e = source.next())
		{
			batcher.add(std::move(*e));
		}
	}
	catch(const Error& e)
	{
		// Complete entries received before a transport failure still reach
		// the kernel; the run itself fails.
		if(e.code() == Errc::truncated_trace)
		{
			batcher.flush();
		}
		throw;
	}
	batcher.flush();
	return finalize_guarded(kernel, batcher.seen());
}

Report run_streaming(TcpListener& listener, AnalysisKernel& kernel, const BatchingPolicy& policy, const SnapshotHook& hook)
{
	auto source = listener.accept();
	return run_streaming(*source, kernel, policy, hook);
}

KernelStage::KernelStage(AnalysisKernel& kernel, BatchingPolicy policy) :
	m_kernel(kernel), m_policy(policy), m_report(std::make_shared<std::optional<Report>>())
{
}

std::unique_ptr<EntrySource> KernelStage::bind(std::unique_ptr<EntrySource> upstream)
{
	return std::make_unique<KernelDrain>(std::move(upstream), m_kernel, m_policy, m_report);
}

} // namespace tracekit
