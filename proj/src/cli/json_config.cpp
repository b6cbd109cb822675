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

#include "json_config.hpp"

#include <json.hpp>

namespace tracekit::cli {

namespace {

std::string scalar_text(const nlohmann::json& value, const std::string& name)
{
	if(value.is_string())
	{
		return value.get<std::string>();
	}
	if(value.is_boolean())
	{
		return value.get<bool>() ? "true" : "false";
	}
	if(value.is_number())
	{
		return value.dump();
	}
	throw CLI::ConversionError("config value for \"" + name + "\" must be a string, number or boolean");
}

void flatten(const nlohmann::json& node, const std::string& name, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out)
{
	if(node.is_object())
	{
		std::vector<std::string> inner = parents;
		if(!name.empty())
		{
			inner.push_back(name);
		}
		for(auto it = node.begin(); it != node.end(); ++it)
		{
			flatten(it.value(), it.key(), inner, out);
		}
		return;
	}
	if(name.empty())
	{
		throw CLI::ConversionError("config document must be a JSON object");
	}
	CLI::ConfigItem item;
	item.name = name;
	item.parents = parents;
	if(node.is_array())
	{
		for(const auto& v : node)
		{
			item.inputs.push_back(scalar_text(v, name));
		}
	}
	else
	{
		item.inputs.push_back(scalar_text(node, name));
	}
	out.push_back(std::move(item));
}

} // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool, std::string) const
{
	nlohmann::json doc = nlohmann::json::object();
	for(const CLI::Option* opt : app->get_options({}))
	{
		if(!opt->get_configurable() || opt->get_lnames().empty())
		{
			continue;
		}
		const std::string& key = opt->get_lnames().front();
		if(opt->count() > 0)
		{
			auto results = opt->results();
			if(results.size() == 1 && opt->get_expected_max() <= 1)
			{
				doc[key] = results.front();
			}
			else
			{
				doc[key] = results;
			}
		}
		else if(default_also && !opt->get_default_str().empty())
		{
			doc[key] = opt->get_default_str();
		}
	}
	for(const CLI::App* sub : app->get_subcommands({}))
	{
		auto text = to_config(sub, default_also, false, "");
		auto nested = nlohmann::json::parse(text);
		if(!nested.empty())
		{
			doc[sub->get_name()] = std::move(nested);
		}
	}
	return doc.dump(2) + "\n";
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const
{
	nlohmann::json doc;
	try
	{
		input >> doc;
	}
	catch(const nlohmann::json::exception& e)
	{
		throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
	}
	std::vector<CLI::ConfigItem> items;
	flatten(doc, "", {}, items);
	return items;
}

} // namespace tracekit::cli
