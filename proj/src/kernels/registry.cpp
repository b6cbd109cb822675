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

#include "tracekit/kernels.hpp"

#include <functional>

#include "tracekit/error.hpp"

namespace tracekit {

namespace {

using Factory = std::function<std::unique_ptr<AnalysisKernel>(const StringTable&)>;

template<typename K>
std::pair<std::string, Factory> entry()
{
	return {K::kName, [](const StringTable& t) { return std::make_unique<K>(t); }};
}

const std::map<std::string, Factory>& registry()
{
	static const std::map<std::string, Factory> kernels = {
		entry<AccessCounter>(),
		entry<CacheOffenders>(),
		entry<StructSplitting>(),
		entry<SharedVarPhase1>(),
		entry<SharedVarPhase2>(),
	};
	return kernels;
}

} // namespace

std::vector<std::string> kernel_names()
{
	std::vector<std::string> out;
	for(const auto& [name, factory] : registry())
	{
		out.push_back(name);
	}
	return out;
}

std::unique_ptr<AnalysisKernel> make_kernel(std::string_view name, const StringTable& names)
{
	const auto& reg = registry();
	auto it = reg.find(std::string(name));
	if(it == reg.end())
	{
		std::string known;
		for(const auto& [n, f] : reg)
		{
			known += (known.empty() ? "" : ", ") + n;
		}
		fail(Errc::unknown_kernel, "\"" + std::string(name) + "\"; available: " + known);
	}
	return it->second(names);
}

} // namespace tracekit
