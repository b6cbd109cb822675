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

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "tracekit/transport.hpp"

namespace tracekit {

/// Wire format of a link between two stages. `none` marks the open end of
/// a source (nothing consumed) or a terminal (nothing produced).
enum class StreamKind
{
	none,
	binary,
	text,
};

std::string_view to_string(StreamKind k);

/// One step of a pipeline. A stage consumes the upstream entry stream
/// (unless its input is `none`) and returns the stream it produces.
/// Terminal stages return a stream that drains upstream and then ends.
class Stage
{
public:
	virtual ~Stage() = default;
	virtual std::string name() const = 0;
	virtual StreamKind input() const = 0;
	virtual StreamKind output() const = 0;
	virtual std::unique_ptr<EntrySource> bind(std::unique_ptr<EntrySource> upstream) = 0;
};

struct RunResult
{
	std::size_t entries_out = 0;
	// Filled when the last stage still produces a stream.
	std::vector<LogEntry> output;
};

class Pipeline
{
public:
	/// Type-checks adjacent stages; mismatches throw
	/// Errc::incompatible_stages.
	static Pipeline chain(std::vector<std::unique_ptr<Stage>> stages);

	/// upstream feeds the first stage when its input is not `none`.
	RunResult run(std::unique_ptr<EntrySource> upstream = nullptr);

	const std::vector<std::unique_ptr<Stage>>& stages() const { return m_stages; }

private:
	explicit Pipeline(std::vector<std::unique_ptr<Stage>> stages) : m_stages(std::move(stages)) {}

	std::vector<std::unique_ptr<Stage>> m_stages;
};

/// Emits a fixed entry list (e.g. a producer run).
class EntriesStage : public Stage
{
public:
	EntriesStage(std::string name, std::vector<LogEntry> entries) : m_name(std::move(name)), m_entries(std::move(entries)) {}

	std::string name() const override { return m_name; }
	StreamKind input() const override { return StreamKind::none; }
	StreamKind output() const override { return StreamKind::binary; }
	std::unique_ptr<EntrySource> bind(std::unique_ptr<EntrySource> upstream) override;

private:
	std::string m_name;
	std::vector<LogEntry> m_entries;
};

class FileSourceStage : public Stage
{
public:
	FileSourceStage(std::filesystem::path path, TraceFormat format, const StringTable* table = nullptr) :
		m_path(std::move(path)), m_format(format), m_table(table)
	{
	}

	std::string name() const override { return "read " + m_path.string(); }
	StreamKind input() const override { return StreamKind::none; }
	StreamKind output() const override;
	std::unique_ptr<EntrySource> bind(std::unique_ptr<EntrySource> upstream) override;

private:
	std::filesystem::path m_path;
	TraceFormat m_format;
	const StringTable* m_table;
};

/// Accepts one connection on an already bound listener.
class SocketSourceStage : public Stage
{
public:
	explicit SocketSourceStage(TcpListener& listener) : m_listener(listener) {}

	std::string name() const override { return "listen " + m_listener.endpoint().to_string(); }
	StreamKind input() const override { return StreamKind::none; }
	StreamKind output() const override { return StreamKind::binary; }
	std::unique_ptr<EntrySource> bind(std::unique_ptr<EntrySource> upstream) override;

private:
	TcpListener& m_listener;
};

class PassThroughStage : public Stage
{
public:
	explicit PassThroughStage(StreamKind kind = StreamKind::binary) : m_kind(kind) {}

	std::string name() const override { return "pass"; }
	StreamKind input() const override { return m_kind; }
	StreamKind output() const override { return m_kind; }
	std::unique_ptr<EntrySource> bind(std::unique_ptr<EntrySource> upstream) override { return upstream; }

private:
	StreamKind m_kind;
};

/// Re-labels a link between the binary and text wire formats.
class ReformatStage : public Stage
{
public:
	ReformatStage(StreamKind from, StreamKind to) : m_from(from), m_to(to) {}

	std::string name() const override;
	StreamKind input() const override { return m_from; }
	StreamKind output() const override { return m_to; }
	std::unique_ptr<EntrySource> bind(std::unique_ptr<EntrySource> upstream) override { return upstream; }

private:
	StreamKind m_from;
	StreamKind m_to;
};

/// Terminal writing to a file or socket. Its input kind is the sink format.
class SinkStage : public Stage
{
public:
	explicit SinkStage(SinkConfig cfg) : m_cfg(std::move(cfg)) {}

	std::string name() const override;
	StreamKind input() const override;
	StreamKind output() const override { return StreamKind::none; }
	std::unique_ptr<EntrySource> bind(std::unique_ptr<EntrySource> upstream) override;

private:
	SinkConfig m_cfg;
};

} // namespace tracekit
