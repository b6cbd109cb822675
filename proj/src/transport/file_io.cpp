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

#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <sys/stat.h>

#include "streams.hpp"
#include "tracekit/error.hpp"
#include "tracekit/text_codec.hpp"

namespace tracekit {

namespace detail {

BufferedSink::BufferedSink(Fd fd, std::string label, TraceFormat format, std::size_t buffer_entries, const StringTable* table) :
	m_fd(std::move(fd)),
	m_label(std::move(label)),
	m_format(format),
	m_buffer_entries(buffer_entries),
	m_table(table)
{
	if(m_buffer_entries < 1)
	{
		fail(Errc::config_error, "buffer_entries must be >= 1");
	}
	if(m_format == TraceFormat::text && m_table == nullptr)
	{
		fail(Errc::config_error, "text output needs string maps");
	}
	if(m_format == TraceFormat::binary)
	{
		m_buffer.reserve(m_buffer_entries * kEntrySize);
	}
}

BufferedSink::~BufferedSink()
{
	try
	{
		close();
	}
	catch(...)
	{
	}
}

void BufferedSink::write(const LogEntry& entry)
{
	if(m_closed)
	{
		fail(Errc::io_error, m_label + ": write after close");
	}
	if(m_format == TraceFormat::binary)
	{
		const auto old = m_buffer.size();
		m_buffer.resize(old + kEntrySize);
		encode_binary(entry, std::span<std::uint8_t, kEntrySize>(m_buffer.data() + old, kEntrySize));
	}
	else
	{
		const auto line = encode_text(entry, *m_table);
		m_buffer.insert(m_buffer.end(), line.begin(), line.end());
	}
	if(++m_pending >= m_buffer_entries)
	{
		flush();
	}
}

void BufferedSink::flush()
{
	if(!m_buffer.empty())
	{
		m_fd.write_all(m_buffer, m_label);
	}
	m_buffer.clear();
	m_pending = 0;
}

void BufferedSink::close()
{
	if(m_closed)
	{
		return;
	}
	m_closed = true;
	flush();
	m_fd.reset();
}

BinaryFdSource::BinaryFdSource(Fd fd, std::string label) :
	m_fd(std::move(fd)),
	m_label(std::move(label)),
	m_buffer(SinkConfig::kDefaultBufferEntries * kEntrySize)
{
}

bool BinaryFdSource::refill()
{
	if(m_begin > 0)
	{
		std::memmove(m_buffer.data(), m_buffer.data() + m_begin, m_end - m_begin);
		m_end -= m_begin;
		m_begin = 0;
	}
	bool reset = false;
	const auto n = m_fd.read_some(std::span(m_buffer).subspan(m_end), reset, m_label);
	if(reset)
	{
		fail(Errc::truncated_trace, m_label + ": connection reset after " + std::to_string(m_delivered) + " entries");
	}
	m_end += n;
	return n > 0;
}

std::optional<LogEntry> BinaryFdSource::next()
{
	while(m_end - m_begin < kEntrySize)
	{
		if(m_eof || !refill())
		{
			m_eof = true;
			if(m_end != m_begin)
			{
				const auto partial = m_end - m_begin;
				m_begin = m_end;
				fail(Errc::truncated_trace, m_label + ": stream ended " + std::to_string(partial) + " bytes into entry " + std::to_string(m_delivered));
			}
			return std::nullopt;
		}
	}
	auto entry = decode_binary(std::span<const std::uint8_t>(m_buffer.data() + m_begin, kEntrySize));
	m_begin += kEntrySize;
	++m_delivered;
	return entry;
}

} // namespace detail

namespace {

class TextFileSource : public EntrySource
{
public:
	TextFileSource(const std::filesystem::path& path, const StringTable& table) :
		m_in(path, std::ios::binary), m_label(path.string()), m_table(table)
	{
		if(!m_in)
		{
			fail(Errc::io_error, "cannot open " + m_label);
		}
	}

	std::optional<LogEntry> next() override
	{
		std::string line;
		if(!std::getline(m_in, line))
		{
			if(m_in.bad())
			{
				fail(Errc::io_error, "read failed for " + m_label);
			}
			return std::nullopt;
		}
		++m_line;
		try
		{
			return decode_text(line, m_table);
		}
		catch(const Error& e)
		{
			throw Error(e.code(), m_label + " line " + std::to_string(m_line) + ": " + e.what());
		}
	}

private:
	std::ifstream m_in;
	std::string m_label;
	const StringTable& m_table;
	std::size_t m_line = 0;
};

} // namespace

TraceFormat parse_trace_format(std::string_view s)
{
	if(s == "binary")
	{
		return TraceFormat::binary;
	}
	if(s == "text")
	{
		return TraceFormat::text;
	}
	fail(Errc::config_error, "unknown trace format \"" + std::string(s) + "\" (binary|text)");
}

std::string_view to_string(TraceFormat f)
{
	return f == TraceFormat::binary ? "binary" : "text";
}

std::vector<LogEntry> drain(EntrySource& source)
{
	std::vector<LogEntry> out;
	while(auto e = source.next())
	{
		out.push_back(std::move(*e));
	}
	return out;
}

std::unique_ptr<EntrySink> open_sink(const SinkConfig& cfg)
{
	if(cfg.buffer_entries < 1)
	{
		fail(Errc::config_error, "buffer_entries must be >= 1");
	}
	if(const auto* path = std::get_if<std::filesystem::path>(&cfg.destination))
	{
		detail::Fd fd(::open(path->c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
		if(!fd.valid())
		{
			fail(Errc::io_error, "cannot open " + path->string() + ": " + detail::errno_message(errno));
		}
		return std::make_unique<detail::BufferedSink>(std::move(fd), path->string(), cfg.format, cfg.buffer_entries, cfg.table);
	}

	const auto& endpoint = std::get<Endpoint>(cfg.destination);
	if(cfg.format != TraceFormat::binary)
	{
		fail(Errc::config_error, "socket sinks carry binary entries only");
	}
	auto fd = detail::connect_to(endpoint, cfg.connect_wait);
	return std::make_unique<detail::BufferedSink>(std::move(fd), "tcp " + endpoint.to_string(), cfg.format, cfg.buffer_entries, cfg.table);
}

std::unique_ptr<EntrySource> open_trace(const std::filesystem::path& path, TraceFormat format, const StringTable* table)
{
	if(format == TraceFormat::text)
	{
		if(table == nullptr)
		{
			fail(Errc::config_error, "text input needs string maps");
		}
		return std::make_unique<TextFileSource>(path, *table);
	}

	detail::Fd fd(::open(path.c_str(), O_RDONLY | O_CLOEXEC));
	if(!fd.valid())
	{
		fail(Errc::io_error, "cannot open " + path.string() + ": " + detail::errno_message(errno));
	}
	struct stat st{};
	if(::fstat(fd.get(), &st) != 0)
	{
		fail(Errc::io_error, "cannot stat " + path.string());
	}
	if(S_ISREG(st.st_mode) && st.st_size % static_cast<off_t>(kEntrySize) != 0)
	{
		fail(Errc::truncated_trace, path.string() + " is " + std::to_string(st.st_size) + " bytes, not a multiple of 48");
	}
	return std::make_unique<detail::BinaryFdSource>(std::move(fd), path.string());
}

std::vector<LogEntry> read_trace(const std::filesystem::path& path, TraceFormat format, const StringTable* table)
{
	auto source = open_trace(path, format, table);
	return drain(*source);
}

void write_trace(const std::filesystem::path& path, const std::vector<LogEntry>& entries, TraceFormat format, const StringTable* table, std::size_t buffer_entries)
{
	SinkConfig cfg;
	cfg.destination = path;
	cfg.format = format;
	cfg.table = table;
	cfg.buffer_entries = buffer_entries;
	auto sink = open_sink(cfg);
	for(const auto& e : entries)
	{
		sink->write(e);
	}
	sink->close();
}

} // namespace tracekit
