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
#include <vector>

#include "fd.hpp"
#include "tracekit/transport.hpp"

namespace tracekit::detail {

/// Encodes entries into an in-memory buffer and hands it to the descriptor
/// in one write every buffer_entries entries.
class BufferedSink : public EntrySink
{
public:
	BufferedSink(Fd fd, std::string label, TraceFormat format, std::size_t buffer_entries, const StringTable* table);
	~BufferedSink() override;

	void write(const LogEntry& entry) override;
	void close() override;

private:
	void flush();

	Fd m_fd;
	std::string m_label;
	TraceFormat m_format;
	std::size_t m_buffer_entries;
	const StringTable* m_table;
	std::vector<std::uint8_t> m_buffer;
	std::size_t m_pending = 0;
	bool m_closed = false;
};

/// Decodes a raw 48-byte entry stream from a descriptor.
class BinaryFdSource : public EntrySource
{
public:
	BinaryFdSource(Fd fd, std::string label);

	std::optional<LogEntry> next() override;

private:
	bool refill();

	Fd m_fd;
	std::string m_label;
	std::vector<std::uint8_t> m_buffer;
	std::size_t m_begin = 0;
	std::size_t m_end = 0;
	std::uint64_t m_delivered = 0;
	bool m_eof = false;
};

Fd connect_to(const Endpoint& endpoint, std::chrono::milliseconds wait);

} // namespace tracekit::detail
