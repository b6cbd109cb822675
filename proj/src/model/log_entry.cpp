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

#include "tracekit/log_entry.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "tracekit/error.hpp"

namespace tracekit {

namespace {

constexpr std::size_t kHeaderSize = 3;

class Writer
{
public:
	explicit Writer(std::span<std::uint8_t, kEntrySize> out) : m_out(out) {}

	void u8(std::uint8_t v) { m_out[m_pos++] = v; }

	void u32(std::uint32_t v)
	{
		for(int i = 0; i < 4; ++i)
		{
			m_out[m_pos++] = static_cast<std::uint8_t>(v >> (8 * i));
		}
	}

	void u64(std::uint64_t v)
	{
		for(int i = 0; i < 8; ++i)
		{
			m_out[m_pos++] = static_cast<std::uint8_t>(v >> (8 * i));
		}
	}

	void loc(const SourceLoc& l)
	{
		u32(l.file);
		u32(l.line);
		u32(l.column);
	}

private:
	std::span<std::uint8_t, kEntrySize> m_out;
	std::size_t m_pos = kHeaderSize;
};

class Reader
{
public:
	explicit Reader(std::span<const std::uint8_t> in) : m_in(in) {}

	std::uint8_t u8() { return m_in[m_pos++]; }

	std::uint32_t u32()
	{
		std::uint32_t v = 0;
		for(int i = 0; i < 4; ++i)
		{
			v |= static_cast<std::uint32_t>(m_in[m_pos++]) << (8 * i);
		}
		return v;
	}

	std::uint64_t u64()
	{
		std::uint64_t v = 0;
		for(int i = 0; i < 8; ++i)
		{
			v |= static_cast<std::uint64_t>(m_in[m_pos++]) << (8 * i);
		}
		return v;
	}

	SourceLoc loc()
	{
		SourceLoc l;
		l.file = u32();
		l.line = u32();
		l.column = u32();
		return l;
	}

	std::size_t position() const { return m_pos; }

private:
	std::span<const std::uint8_t> m_in;
	std::size_t m_pos = kHeaderSize;
};

void check_loc(const SourceLoc& loc)
{
	if(loc.line < 1)
	{
		fail(Errc::malformed_entry, "source line must be >= 1");
	}
}

} // namespace

ThreadId checked_thread_id(std::size_t index)
{
	if(index >= kMaxThreads)
	{
		fail(Errc::invalid_spec, "thread index " + std::to_string(index) + " does not fit the 8-bit thread field");
	}
	return static_cast<ThreadId>(index);
}

void validate(const LogEntry& entry)
{
	const auto hint = static_cast<std::uint8_t>(entry.hint);
	if(hint != 0x00 && hint != 0x01 && hint != 0xFF)
	{
		fail(Errc::malformed_entry, "hint byte " + std::to_string(hint) + " is not hit, miss or unannotated");
	}
	if(!entry.is_access() && entry.hint != CacheHint::none)
	{
		fail(Errc::malformed_entry, "only access events carry a cache hint");
	}

	if(const auto* fn = entry.function())
	{
		if(static_cast<std::uint8_t>(fn->phase) > 1)
		{
			fail(Errc::malformed_entry, "function phase out of range");
		}
	}
	else if(const auto* acc = entry.access())
	{
		if(static_cast<std::uint8_t>(acc->kind) > 1)
		{
			fail(Errc::malformed_entry, "access kind out of range");
		}
		check_loc(acc->loc);
	}
	else if(const auto* alloc = entry.allocation())
	{
		if(alloc->elem_size < 1 || alloc->count < 1)
		{
			fail(Errc::malformed_entry, "allocation with zero element size or count");
		}
		constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
		if(alloc->elem_size > kMax / alloc->count)
		{
			fail(Errc::malformed_entry, "allocation size overflows 64 bits");
		}
		// [base, base + size) must not wrap; base + size == 2^64 is allowed.
		if(alloc->size_bytes() - 1 > kMax - alloc->base)
		{
			fail(Errc::malformed_entry, "allocation wraps the address space");
		}
		check_loc(alloc->loc);
	}
}

bool is_valid(const LogEntry& entry) noexcept
{
	try
	{
		validate(entry);
		return true;
	}
	catch(const Error&)
	{
		return false;
	}
}

void encode_binary(const LogEntry& entry, std::span<std::uint8_t, kEntrySize> out)
{
	std::fill(out.begin(), out.end(), std::uint8_t{0});
	out[0] = static_cast<std::uint8_t>(entry.kind());
	out[1] = entry.thread;
	out[2] = static_cast<std::uint8_t>(entry.hint);

	Writer w(out);
	if(const auto* fn = entry.function())
	{
		w.u32(fn->function);
		w.u8(static_cast<std::uint8_t>(fn->phase));
	}
	else if(const auto* acc = entry.access())
	{
		w.u64(acc->address);
		w.u8(static_cast<std::uint8_t>(acc->kind));
		w.u32(acc->variable);
		w.u32(acc->type);
		w.u64(acc->value_bits);
		w.loc(acc->loc);
	}
	else if(const auto* alloc = entry.allocation())
	{
		w.u64(alloc->base);
		w.u64(alloc->elem_size);
		w.u64(alloc->count);
		w.u32(alloc->type);
		w.loc(alloc->loc);
	}
}

EntryBlock encode_binary(const LogEntry& entry)
{
	EntryBlock block;
	encode_binary(entry, block);
	return block;
}

LogEntry decode_binary(std::span<const std::uint8_t> block)
{
	if(block.size() != kEntrySize)
	{
		fail(Errc::malformed_entry, "entry block is " + std::to_string(block.size()) + " bytes, expected 48");
	}

	LogEntry entry;
	entry.thread = block[1];
	entry.hint = static_cast<CacheHint>(block[2]);

	Reader r(block);
	switch(block[0])
	{
	case 0:
	{
		FunctionEvent fn;
		fn.function = r.u32();
		fn.phase = static_cast<FunctionPhase>(r.u8());
		entry.payload = fn;
		break;
	}
	case 1:
	{
		AccessEvent acc;
		acc.address = r.u64();
		acc.kind = static_cast<AccessKind>(r.u8());
		acc.variable = r.u32();
		acc.type = r.u32();
		acc.value_bits = r.u64();
		acc.loc = r.loc();
		entry.payload = acc;
		break;
	}
	case 2:
	{
		AllocEvent alloc;
		alloc.base = r.u64();
		alloc.elem_size = r.u64();
		alloc.count = r.u64();
		alloc.type = r.u32();
		alloc.loc = r.loc();
		entry.payload = alloc;
		break;
	}
	default:
		fail(Errc::malformed_entry, "unknown entry kind " + std::to_string(block[0]));
	}

	for(std::size_t i = r.position(); i < kEntrySize; ++i)
	{
		if(block[i] != 0)
		{
			fail(Errc::malformed_entry, "non-zero padding at byte " + std::to_string(i));
		}
	}

	validate(entry);
	return entry;
}

} // namespace tracekit
