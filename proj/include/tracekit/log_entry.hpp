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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>

namespace tracekit {

using StringId = std::uint32_t;
using ThreadId = std::uint8_t;

inline constexpr std::size_t kEntrySize = 48;
inline constexpr std::size_t kMaxThreads = 256;

/// Converts an emulated thread index to the 8-bit id carried in the log.
/// Indices that do not fit throw Errc::invalid_spec instead of wrapping.
ThreadId checked_thread_id(std::size_t index);

enum class EntryKind : std::uint8_t
{
	function = 0,
	access = 1,
	allocation = 2,
};

enum class FunctionPhase : std::uint8_t
{
	entry = 0,
	exit = 1,
};

enum class AccessKind : std::uint8_t
{
	read = 0,
	write = 1,
};

/// In-band annotation written by the cache simulator.
enum class CacheHint : std::uint8_t
{
	hit = 0x00,
	miss = 0x01,
	none = 0xFF,
};

struct SourceLoc
{
	StringId file = 0;
	std::uint32_t line = 1;
	std::uint32_t column = 0; // 0 = unknown

	friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

struct FunctionEvent
{
	StringId function = 0;
	FunctionPhase phase = FunctionPhase::entry;

	friend bool operator==(const FunctionEvent&, const FunctionEvent&) = default;
};

struct AccessEvent
{
	std::uint64_t address = 0;
	AccessKind kind = AccessKind::read;
	StringId variable = 0;
	StringId type = 0;
	// Low 64 bits of the accessed value.
	std::uint64_t value_bits = 0;
	SourceLoc loc;

	friend bool operator==(const AccessEvent&, const AccessEvent&) = default;
};

struct AllocEvent
{
	std::uint64_t base = 0;
	std::uint64_t elem_size = 1;
	std::uint64_t count = 1;
	StringId type = 0;
	SourceLoc loc;

	std::uint64_t size_bytes() const { return elem_size * count; }
	bool contains(std::uint64_t address) const { return address >= base && address - base < size_bytes(); }

	friend bool operator==(const AllocEvent&, const AllocEvent&) = default;
};

using Payload = std::variant<FunctionEvent, AccessEvent, AllocEvent>;

struct LogEntry
{
	ThreadId thread = 0;
	CacheHint hint = CacheHint::none;
	Payload payload;

	EntryKind kind() const { return static_cast<EntryKind>(payload.index()); }

	bool is_access() const { return std::holds_alternative<AccessEvent>(payload); }
	const AccessEvent* access() const { return std::get_if<AccessEvent>(&payload); }
	const AllocEvent* allocation() const { return std::get_if<AllocEvent>(&payload); }
	const FunctionEvent* function() const { return std::get_if<FunctionEvent>(&payload); }

	friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

/// Throws Errc::malformed_entry when the entry breaks a field invariant
/// (enum ranges, line >= 1, non-empty non-wrapping allocation, hint only on
/// accesses).
void validate(const LogEntry& entry);
bool is_valid(const LogEntry& entry) noexcept;

using EntryBlock = std::array<std::uint8_t, kEntrySize>;

/// Fixed 48-byte little-endian image: tag, thread, hint, then the payload
/// fields in declaration order, zero padded.
EntryBlock encode_binary(const LogEntry& entry);
void encode_binary(const LogEntry& entry, std::span<std::uint8_t, kEntrySize> out);

/// Inverse of encode_binary. Rejects wrong lengths, unknown tags, invariant
/// violations and non-zero padding with Errc::malformed_entry.
LogEntry decode_binary(std::span<const std::uint8_t> block);

} // namespace tracekit
