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

#include <CLI11.hpp>

namespace tracekit::cli {

/// Reads --config files written as JSON. Top-level keys are options of the
/// main command; nested objects address subcommands by name, e.g.
/// {"simulate": {"capacity": 32768, "assoc": "full"}}.
class JsonConfig : public CLI::Config
{
public:
	std::string to_config(const CLI::App* app, bool default_also, bool write_description, std::string prefix) const override;
	std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

} // namespace tracekit::cli
