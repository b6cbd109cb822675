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

#include "tracekit/text_codec.hpp"

#include <charconv>
#include <vector>

#include "tracekit/error.hpp"

namespace tracekit {

namespace {

constexpr char kDelim = ' ';

bool needs_escape(char c)
{
	return c == '%' || c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '\0';
}

int hex_value(char c)
{
	if(c >= '0' && c <= '9') return c - '0';
	if(c >= 'A' && c <= 'F') return c - 'A' + 10;
	if(c >= 'a' && c <= 'f') return c - 'a' + 10;
	return -1;
}

class LineBuilder
{
public:
	template<typename T>
	LineBuilder& num(T v)
	{
		sep();
		m_line += std::to_string(v);
		return *this;
	}

	LineBuilder& name(const StringTable& table, Namespace ns, StringId id)
	{
		sep();
		m_line += escape_name(table.resolve(ns, id));
		return *this;
	}

	std::string finish()
	{
		m_line += '\n';
		return std::move(m_line);
	}

private:
	void sep()
	{
		if(!m_line.empty())
		{
			m_line += kDelim;
		}
	}

	std::string m_line;
};

class FieldCursor
{
public:
	FieldCursor(std::vector<std::string_view> fields, const StringTable& table) :
		m_fields(std::move(fields)), m_table(table)
	{
	}

	template<typename T>
	T num(const char* what)
	{
		const auto f = m_fields.at(m_pos++);
		T value{};
		auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
		if(f.empty() || ec != std::errc() || ptr != f.data() + f.size())
		{
			fail(Errc::malformed_entry, std::string(what) + " field \"" + std::string(f) + "\" is not a valid number");
		}
		return value;
	}

	StringId name(Namespace ns)
	{
		const auto s = unescape_name(m_fields.at(m_pos++));
		auto id = m_table.find(ns, s);
		if(!id)
		{
			fail(Errc::unknown_id, "name \"" + s + "\" not present in " + std::string(to_string(ns)));
		}
		return *id;
	}

	SourceLoc loc()
	{
		SourceLoc l;
		l.file = name(Namespace::files);
		l.line = num<std::uint32_t>("line");
		l.column = num<std::uint32_t>("column");
		return l;
	}

private:
	std::vector<std::string_view> m_fields;
	std::size_t m_pos = 3;
	const StringTable& m_table;
};

} // namespace

std::string escape_name(std::string_view name)
{
	static constexpr char kHex[] = "0123456789ABCDEF";
	std::string out;
	out.reserve(name.size());
	for(char c : name)
	{
		if(needs_escape(c))
		{
			const auto u = static_cast<unsigned char>(c);
			out += '%';
			out += kHex[u >> 4];
			out += kHex[u & 0xF];
		}
		else
		{
			out += c;
		}
	}
	// An empty name still needs a visible token.
	return out.empty() ? std::string("%00%") : out;
}

std::string unescape_name(std::string_view text)
{
	if(text == "%00%")
	{
		return {};
	}
	std::string out;
	out.reserve(text.size());
	for(std::size_t i = 0; i < text.size(); ++i)
	{
		if(text[i] != '%')
		{
			out += text[i];
			continue;
		}
		if(i + 2 >= text.size())
		{
			fail(Errc::malformed_entry, "truncated escape in \"" + std::string(text) + "\"");
		}
		const int hi = hex_value(text[i + 1]);
		const int lo = hex_value(text[i + 2]);
		if(hi < 0 || lo < 0)
		{
			fail(Errc::malformed_entry, "bad escape in \"" + std::string(text) + "\"");
		}
		out += static_cast<char>(hi * 16 + lo);
		i += 2;
	}
	return out;
}

std::string encode_text(const LogEntry& entry, const StringTable& table)
{
	LineBuilder b;
	b.num(static_cast<unsigned>(entry.kind())).num(static_cast<unsigned>(entry.thread)).num(static_cast<unsigned>(entry.hint));

	if(const auto* fn = entry.function())
	{
		b.name(table, Namespace::functions, fn->function).num(static_cast<unsigned>(fn->phase));
	}
	else if(const auto* acc = entry.access())
	{
		b.num(acc->address)
			.num(static_cast<unsigned>(acc->kind))
			.name(table, Namespace::variables, acc->variable)
			.name(table, Namespace::types, acc->type)
			.num(acc->value_bits)
			.name(table, Namespace::files, acc->loc.file)
			.num(acc->loc.line)
			.num(acc->loc.column);
	}
	else if(const auto* alloc = entry.allocation())
	{
		b.num(alloc->base)
			.num(alloc->elem_size)
			.num(alloc->count)
			.name(table, Namespace::types, alloc->type)
			.name(table, Namespace::files, alloc->loc.file)
			.num(alloc->loc.line)
			.num(alloc->loc.column);
	}
	return b.finish();
}

LogEntry decode_text(std::string_view line, const StringTable& table)
{
	if(!line.empty() && line.back() == '\n')
	{
		line.remove_suffix(1);
	}

	std::vector<std::string_view> fields;
	std::size_t start = 0;
	while(true)
	{
		const auto pos = line.find(kDelim, start);
		fields.push_back(line.substr(start, pos - start));
		if(pos == std::string_view::npos)
		{
			break;
		}
		start = pos + 1;
	}

	if(fields.size() < 3)
	{
		fail(Errc::malformed_entry, "text entry has " + std::to_string(fields.size()) + " fields");
	}

	static constexpr std::size_t kFieldCount[] = {5, 11, 10};
	auto parse_head = [&](std::size_t idx, const char* what) {
		const auto f = fields[idx];
		unsigned value = 0;
		auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
		if(f.empty() || ec != std::errc() || ptr != f.data() + f.size() || value > 0xFF)
		{
			fail(Errc::malformed_entry, std::string(what) + " field \"" + std::string(f) + "\" is not a byte value");
		}
		return static_cast<std::uint8_t>(value);
	};

	const auto tag = parse_head(0, "kind");
	if(tag > 2)
	{
		fail(Errc::malformed_entry, "unknown entry kind " + std::to_string(tag));
	}
	if(fields.size() != kFieldCount[tag])
	{
		fail(Errc::malformed_entry, "entry kind " + std::to_string(tag) + " expects " + std::to_string(kFieldCount[tag]) + " fields, got " + std::to_string(fields.size()));
	}

	LogEntry entry;
	entry.thread = parse_head(1, "thread");
	entry.hint = static_cast<CacheHint>(parse_head(2, "hint"));

	FieldCursor c(std::move(fields), table);
	switch(tag)
	{
	case 0:
	{
		FunctionEvent fn;
		fn.function = c.name(Namespace::functions);
		fn.phase = static_cast<FunctionPhase>(c.num<std::uint8_t>("phase"));
		entry.payload = fn;
		break;
	}
	case 1:
	{
		AccessEvent acc;
		acc.address = c.num<std::uint64_t>("address");
		acc.kind = static_cast<AccessKind>(c.num<std::uint8_t>("access kind"));
		acc.variable = c.name(Namespace::variables);
		acc.type = c.name(Namespace::types);
		acc.value_bits = c.num<std::uint64_t>("value");
		acc.loc = c.loc();
		entry.payload = acc;
		break;
	}
	default:
	{
		AllocEvent alloc;
		alloc.base = c.num<std::uint64_t>("base");
		alloc.elem_size = c.num<std::uint64_t>("element size");
		alloc.count = c.num<std::uint64_t>("count");
		alloc.type = c.name(Namespace::types);
		alloc.loc = c.loc();
		entry.payload = alloc;
		break;
	}
	}

	validate(entry);
	return entry;
}

} // namespace tracekit
