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

#include "tracekit/report.hpp"

#include <stdexcept>

namespace tracekit {

namespace {

std::string csv_field(const Cell& cell)
{
	std::string text;
	if(cell.is_string())
	{
		text = cell.get<std::string>();
	}
	else
	{
		text = cell.dump();
	}
	if(text.find_first_of(",\"\n\r") == std::string::npos)
	{
		return text;
	}
	std::string quoted = "\"";
	for(char c : text)
	{
		if(c == '"')
		{
			quoted += '"';
		}
		quoted += c;
	}
	quoted += '"';
	return quoted;
}

} // namespace

Report::Report(std::string kernel, std::vector<std::string> columns) :
	m_kernel(std::move(kernel)), m_columns(std::move(columns))
{
}

void Report::add_row(std::vector<Cell> cells)
{
	if(cells.size() != m_columns.size())
	{
		throw std::logic_error("report row has " + std::to_string(cells.size()) + " cells for " + std::to_string(m_columns.size()) + " columns");
	}
	m_rows.push_back(std::move(cells));
}

const Cell& Report::at(std::size_t row, const std::string& column) const
{
	for(std::size_t c = 0; c < m_columns.size(); ++c)
	{
		if(m_columns[c] == column)
		{
			return m_rows.at(row).at(c);
		}
	}
	throw std::out_of_range("no column \"" + column + "\" in " + m_kernel + " report");
}

std::string Report::to_csv() const
{
	std::string out;
	for(std::size_t c = 0; c < m_columns.size(); ++c)
	{
		out += (c ? "," : "") + csv_field(Cell(m_columns[c]));
	}
	out += '\n';
	for(const auto& row : m_rows)
	{
		for(std::size_t c = 0; c < row.size(); ++c)
		{
			out += (c ? "," : "") + csv_field(row[c]);
		}
		out += '\n';
	}
	return out;
}

nlohmann::ordered_json Report::to_json() const
{
	auto doc = nlohmann::ordered_json::array();
	for(const auto& row : m_rows)
	{
		nlohmann::ordered_json obj = nlohmann::ordered_json::object();
		for(std::size_t c = 0; c < row.size(); ++c)
		{
			obj[m_columns[c]] = row[c];
		}
		doc.push_back(std::move(obj));
	}
	return doc;
}

std::string Report::to_json_text() const
{
	return to_json().dump(2) + "\n";
}

} // namespace tracekit
