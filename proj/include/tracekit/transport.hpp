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
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tracekit/log_entry.hpp"
#include "tracekit/string_table.hpp"

namespace tracekit {

enum class TraceFormat
{
	binary,
	text,
};

TraceFormat parse_trace_format(std::string_view s);
std::string_view to_string(TraceFormat f);

/// Pull-side of a trace: yields entries in order, nullopt at the end.
class EntrySource
{
public:
	virtual ~EntrySource() = default;
	virtual std::optional<LogEntry> next() = 0;
};

/// Push-side of a trace. close() flushes; writing after close is an error.
class EntrySink
{
public:
	virtual ~EntrySink() = default;
	virtual void write(const LogEntry& entry) = 0;
	virtual void close() = 0;
};

class VectorSource : public EntrySource
{
public:
	explicit VectorSource(std::vector<LogEntry> entries) : m_entries(std::move(entries)) {}

	std::optional<LogEntry> next() override
	{
		if(m_pos == m_entries.size())
		{
			return std::nullopt;
		}
		return m_entries[m_pos++];
	}

private:
	std::vector<LogEntry> m_entries;
	std::size_t m_pos = 0;
};

std::vector<LogEntry> drain(EntrySource& source);

struct Endpoint
{
	std::string host = "127.0.0.1";
	std::uint16_t port = 0;

	/// "host:port" or ":port"; throws Errc::config_error.
	static Endpoint parse(std::string_view text);
	std::string to_string() const;
};

struct SinkConfig
{
	static constexpr std::size_t kDefaultBufferEntries = 4096;

	std::variant<std::filesystem::path, Endpoint> destination;
	TraceFormat format = TraceFormat::binary;
	std::size_t buffer_entries = kDefaultBufferEntries;
	// Required for text output.
	const StringTable* table = nullptr;
	// How long a socket sink keeps retrying the initial connect.
	std::chrono::milliseconds connect_wait{0};
};

/// Entries reach the destination in write order; the buffer is flushed
/// every buffer_entries entries and on close. Throws Errc::io_error,
/// Errc::connection_refused or Errc::config_error.
std::unique_ptr<EntrySink> open_sink(const SinkConfig& cfg);

/// Streams a trace file. Binary files whose length is not a multiple of 48
/// throw Errc::truncated_trace on open. Text requires a table.
std::unique_ptr<EntrySource> open_trace(const std::filesystem::path& path, TraceFormat format, const StringTable* table = nullptr);

std::vector<LogEntry> read_trace(const std::filesystem::path& path, TraceFormat format, const StringTable* table = nullptr);

void write_trace(const std::filesystem::path& path, const std::vector<LogEntry>& entries, TraceFormat format = TraceFormat::binary, const StringTable* table = nullptr, std::size_t buffer_entries = SinkConfig::kDefaultBufferEntries);

/// Listening socket that hands out exactly one binary entry stream per
/// accepted connection. The stream ends on orderly close; a partial entry
/// before close (or a reset) throws Errc::truncated_trace after every
/// complete entry has been delivered.
class TcpListener
{
public:
	static TcpListener bind(const Endpoint& endpoint);

	TcpListener(TcpListener&& other) noexcept;
	TcpListener& operator=(TcpListener&& other) noexcept;
	TcpListener(const TcpListener&) = delete;
	TcpListener& operator=(const TcpListener&) = delete;
	~TcpListener();

	std::uint16_t port() const { return m_port; }
	Endpoint endpoint() const;
	std::unique_ptr<EntrySource> accept();

private:
	TcpListener(int fd, std::string host, std::uint16_t port);

	int m_fd = -1;
	std::string m_host;
	std::uint16_t m_port = 0;
};

/// Connects to a listening receiver and sends every entry of source.
/// Returns the number of entries sent.
std::size_t serve_trace(EntrySource& source, const Endpoint& endpoint, std::chrono::milliseconds connect_wait = std::chrono::milliseconds{0}, std::size_t buffer_entries = SinkConfig::kDefaultBufferEntries);

/// Accepts one connection and collects its entries.
std::vector<LogEntry> receive_trace(TcpListener& listener);

} // namespace tracekit
