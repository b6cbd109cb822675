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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tracekit/log_entry.hpp"

namespace tracekit {

enum class Namespace
{
	files,
	functions,
	variables,
	types,
};

inline constexpr std::array<Namespace, 4> kAllNamespaces = {
	Namespace::files, Namespace::functions, Namespace::variables, Namespace::types};

std::string_view to_string(Namespace ns);

/// Integer <-> string interning for the four name spaces carried in the log.
/// Ids are dense per namespace, starting at 0. Not internally synchronized.
class StringTable
{
public:
	StringId intern(Namespace ns, std::string_view s);
	const std::string& resolve(Namespace ns, StringId id) const;
	std::optional<StringId> find(Namespace ns, std::string_view s) const;
	std::size_t size(Namespace ns) const { return slot(ns).names.size(); }
	bool empty() const;

	/// Adopts ids from another table. Ids already present must agree on
	/// their string, and a string may not be bound to two ids; either
	/// violation throws Errc::conflicting_mapping.
	void merge(const StringTable& other);

	nlohmann::json to_json() const;
	static StringTable from_json(const nlohmann::json& doc);

	friend bool operator==(const StringTable& a, const StringTable& b);

private:
	struct Slot
	{
		std::vector<std::string> names;
		std::unordered_map<std::string, StringId> ids;
	};

	Slot& slot(Namespace ns) { return m_slots[static_cast<std::size_t>(ns)]; }
	const Slot& slot(Namespace ns) const { return m_slots[static_cast<std::size_t>(ns)]; }

	std::array<Slot, 4> m_slots;
};

/// An empty file yields an empty table. Missing or unreadable files throw
/// Errc::io_error; bad documents throw Errc::malformed_json.
StringTable load_string_maps(const std::filesystem::path& path);

/// Loads path (when it exists) and merges it into table.
void merge_string_maps(StringTable& table, const std::filesystem::path& path);

void save_string_maps(const StringTable& table, const std::filesystem::path& path);

} // namespace tracekit
