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

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace tracekit {

using Cell = nlohmann::ordered_json;

/// Tabular kernel output. Row order is part of the result; kernels sort
/// before handing the report out.
class Report
{
public:
	Report() = default;
	Report(std::string kernel, std::vector<std::string> columns);

	/// cells must line up with columns.
	void add_row(std::vector<Cell> cells);

	const std::string& kernel() const { return m_kernel; }
	const std::vector<std::string>& columns() const { return m_columns; }
	const std::vector<std::vector<Cell>>& rows() const { return m_rows; }
	std::size_t size() const { return m_rows.size(); }
	bool empty() const { return m_rows.empty(); }

	/// Cell by column name; throws std::out_of_range for unknown columns.
	const Cell& at(std::size_t row, const std::string& column) const;

	/// Header row then one line per row. Strings are quoted when they hold a
	/// comma, quote or newline; nested arrays are written as compact JSON.
	std::string to_csv() const;

	/// Array of row objects keyed by column name.
	nlohmann::ordered_json to_json() const;
	std::string to_json_text() const;

	// Optional chart-ready data emitted next to the table.
	std::optional<nlohmann::ordered_json> chart;

	friend bool operator==(const Report&, const Report&) = default;

private:
	std::string m_kernel;
	std::vector<std::string> m_columns;
	std::vector<std::vector<Cell>> m_rows;
};

} // namespace tracekit
