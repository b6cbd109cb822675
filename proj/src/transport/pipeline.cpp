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

#include "tracekit/pipeline.hpp"

#include "tracekit/error.hpp"

namespace tracekit {

namespace {

/// Feeds upstream into a sink, then ends. Closing the sink is part of
/// reaching the end so buffered entries are flushed before run() returns.
class DrainIntoSink : public EntrySource
{
public:
	DrainIntoSink(std::unique_ptr<EntrySource> upstream, std::unique_ptr<EntrySink> sink) :
		m_upstream(std::move(upstream)), m_sink(std::move(sink))
	{
	}

	std::optional<LogEntry> next() override
	{
		if(m_sink)
		{
			while(auto e = m_upstream->next())
			{
				m_sink->write(*e);
			}
			m_sink->close();
			m_sink.reset();
		}
		return std::nullopt;
	}

private:
	std::unique_ptr<EntrySource> m_upstream;
	std::unique_ptr<EntrySink> m_sink;
};

StreamKind kind_of(TraceFormat f)
{
	return f == TraceFormat::binary ? StreamKind::binary : StreamKind::text;
}

} // namespace

std::string_view to_string(StreamKind k)
{
	switch(k)
	{
	case StreamKind::none: return "none";
	case StreamKind::binary: return "binary";
	case StreamKind::text: return "text";
	}
	return "?";
}

Pipeline Pipeline::chain(std::vector<std::unique_ptr<Stage>> stages)
{
	if(stages.empty())
	{
		fail(Errc::incompatible_stages, "empty pipeline");
	}
	for(std::size_t i = 0; i + 1 < stages.size(); ++i)
	{
		const auto out = stages[i]->output();
		const auto in = stages[i + 1]->input();
		if(out == StreamKind::none || in == StreamKind::none || out != in)
		{
			fail(Errc::incompatible_stages, "stage \"" + stages[i]->name() + "\" produces " + std::string(to_string(out)) + " but \"" + stages[i + 1]->name() + "\" expects " + std::string(to_string(in)));
		}
	}
	return Pipeline(std::move(stages));
}

RunResult Pipeline::run(std::unique_ptr<EntrySource> upstream)
{
	const bool needs_input = m_stages.front()->input() != StreamKind::none;
	if(needs_input && !upstream)
	{
		fail(Errc::incompatible_stages, "stage \"" + m_stages.front()->name() + "\" needs an upstream stream");
	}
	if(!needs_input && upstream)
	{
		fail(Errc::incompatible_stages, "stage \"" + m_stages.front()->name() + "\" is a source and takes no upstream");
	}

	std::unique_ptr<EntrySource> stream = std::move(upstream);
	for(auto& stage : m_stages)
	{
		stream = stage->bind(std::move(stream));
	}

	RunResult result;
	const bool collect = m_stages.back()->output() != StreamKind::none;
	while(auto e = stream->next())
	{
		++result.entries_out;
		if(collect)
		{
			result.output.push_back(std::move(*e));
		}
	}
	return result;
}

std::unique_ptr<EntrySource> EntriesStage::bind(std::unique_ptr<EntrySource>)
{
	return std::make_unique<VectorSource>(m_entries);
}

StreamKind FileSourceStage::output() const
{
	return kind_of(m_format);
}

std::unique_ptr<EntrySource> FileSourceStage::bind(std::unique_ptr<EntrySource>)
{
	return open_trace(m_path, m_format, m_table);
}

std::unique_ptr<EntrySource> SocketSourceStage::bind(std::unique_ptr<EntrySource>)
{
	return m_listener.accept();
}

std::string ReformatStage::name() const
{
	return std::string(to_string(m_from)) + "->" + std::string(to_string(m_to));
}

std::string SinkStage::name() const
{
	if(const auto* path = std::get_if<std::filesystem::path>(&m_cfg.destination))
	{
		return "write " + path->string();
	}
	return "connect " + std::get<Endpoint>(m_cfg.destination).to_string();
}

StreamKind SinkStage::input() const
{
	return kind_of(m_cfg.format);
}

std::unique_ptr<EntrySource> SinkStage::bind(std::unique_ptr<EntrySource> upstream)
{
	return std::make_unique<DrainIntoSink>(std::move(upstream), open_sink(m_cfg));
}

} // namespace tracekit
