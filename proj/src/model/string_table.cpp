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

#include "tracekit/string_table.hpp"

#include <fstream>
#include <sstream>

#include "tracekit/error.hpp"

namespace tracekit {

std::string_view to_string(Namespace ns)
{
	switch(ns)
	{
	case Namespace::files: return "files";
	case Namespace::functions: return "functions";
	case Namespace::variables: return "variables";
	case Namespace::types: return "types";
	}
	return "unknown";
}

StringId StringTable::intern(Namespace ns, std::string_view s)
{
	auto& sl = slot(ns);
	std::string key(s);
	if(auto it = sl.ids.find(key); it != sl.ids.end())
	{
		return it->second;
	}
	const auto id = static_cast<StringId>(sl.names.size());
	sl.names.push_back(key);
	sl.ids.emplace(std::move(key), id);
	return id;
}

const std::string& StringTable::resolve(Namespace ns, StringId id) const
{
	const auto& sl = slot(ns);
	if(id >= sl.names.size())
	{
		fail(Errc::unknown_id, "id " + std::to_string(id) + " not present in " + std::string(to_string(ns)));
	}
	return sl.names[id];
}

std::optional<StringId> StringTable::find(Namespace ns, std::string_view s) const
{
	const auto& sl = slot(ns);
	if(auto it = sl.ids.find(std::string(s)); it != sl.ids.end())
	{
		return it->second;
	}
	return std::nullopt;
}

bool StringTable::empty() const
{
	for(const auto& sl : m_slots)
	{
		if(!sl.names.empty())
		{
			return false;
		}
	}
	return true;
}

void StringTable::merge(const StringTable& other)
{
	// Validate everything first so a conflict leaves the table untouched.
	for(auto ns : kAllNamespaces)
	{
		const auto& mine = slot(ns);
		const auto& theirs = other.slot(ns);
		for(std::size_t i = 0; i < theirs.names.size(); ++i)
		{
			const auto& name = theirs.names[i];
			if(i < mine.names.size())
			{
				if(mine.names[i] != name)
				{
					fail(Errc::conflicting_mapping, std::string(to_string(ns)) + " id " + std::to_string(i) + " maps to both \"" + mine.names[i] + "\" and \"" + name + "\"");
				}
			}
			else if(auto it = mine.ids.find(name); it != mine.ids.end())
			{
				fail(Errc::conflicting_mapping, std::string(to_string(ns)) + " string \"" + name + "\" bound to ids " + std::to_string(it->second) + " and " + std::to_string(i));
			}
		}
	}
	for(auto ns : kAllNamespaces)
	{
		auto& mine = slot(ns);
		const auto& theirs = other.slot(ns);
		for(std::size_t i = mine.names.size(); i < theirs.names.size(); ++i)
		{
			intern(ns, theirs.names[i]);
		}
	}
}

nlohmann::json StringTable::to_json() const
{
	nlohmann::json doc = nlohmann::json::object();
	for(auto ns : kAllNamespaces)
	{
		doc[std::string(to_string(ns))] = slot(ns).names;
	}
	return doc;
}

StringTable StringTable::from_json(const nlohmann::json& doc)
{
	if(!doc.is_object())
	{
		fail(Errc::malformed_json, "string maps must be a JSON object");
	}
	StringTable table;
	for(auto ns : kAllNamespaces)
	{
		const std::string key(to_string(ns));
		auto it = doc.find(key);
		if(it == doc.end())
		{
			continue;
		}
		if(!it->is_array())
		{
			fail(Errc::malformed_json, "\"" + key + "\" must be an array");
		}
		for(std::size_t i = 0; i < it->size(); ++i)
		{
			const auto& v = (*it)[i];
			if(!v.is_string())
			{
				fail(Errc::malformed_json, "\"" + key + "\"[" + std::to_string(i) + "] is not a string");
			}
			const auto& s = v.get_ref<const std::string&>();
			if(auto prev = table.find(ns, s))
			{
				fail(Errc::conflicting_mapping, key + " string \"" + s + "\" bound to ids " + std::to_string(*prev) + " and " + std::to_string(i));
			}
			table.intern(ns, s);
		}
	}
	return table;
}

bool operator==(const StringTable& a, const StringTable& b)
{
	for(auto ns : kAllNamespaces)
	{
		if(a.slot(ns).names != b.slot(ns).names)
		{
			return false;
		}
	}
	return true;
}

StringTable load_string_maps(const std::filesystem::path& path)
{
	std::ifstream in(path, std::ios::binary);
	if(!in)
	{
		fail(Errc::io_error, "cannot open string maps " + path.string());
	}
	std::stringstream buf;
	buf << in.rdbuf();
	const auto text = buf.str();
	if(text.find_first_not_of(" \t\r\n") == std::string::npos)
	{
		return {};
	}

	nlohmann::json doc;
	try
	{
		doc = nlohmann::json::parse(text);
	}
	catch(const nlohmann::json::exception& e)
	{
		fail(Errc::malformed_json, path.string() + ": " + e.what());
	}
	return StringTable::from_json(doc);
}

void merge_string_maps(StringTable& table, const std::filesystem::path& path)
{
	if(!std::filesystem::exists(path))
	{
		return;
	}
	table.merge(load_string_maps(path));
}

void save_string_maps(const StringTable& table, const std::filesystem::path& path)
{
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if(!out)
	{
		fail(Errc::io_error, "cannot write string maps " + path.string());
	}
	out << table.to_json().dump(1) << '\n';
	if(!out)
	{
		fail(Errc::io_error, "write failed for " + path.string());
	}
}

} // namespace tracekit
