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

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "tracekit/engine.hpp"

namespace tracekit {

/// Registered kernel names, sorted.
std::vector<std::string> kernel_names();

/// Throws Errc::unknown_kernel listing the registered names.
std::unique_ptr<AnalysisKernel> make_kernel(std::string_view name, const StringTable& names);

/// Per-variable access totals.
class AccessCounter : public AnalysisKernel
{
public:
	static constexpr const char* kName = "access_counter";

	explicit AccessCounter(const StringTable& names) : AnalysisKernel(kName, names) {}

	std::optional<Report> snapshot() const override { return build(); }

protected:
	void on_entry(const LogEntry& entry) override;
	void on_batch(std::span<const LogEntry> batch) override;
	Report on_finalize() override { return build(); }

private:
	Report build() const;

	KeyedState<StringId, std::uint64_t> m_counts;
};

/// Ranks (variable, file, line) by simulated misses. Requires an annotated
/// trace; an unannotated access throws Errc::unannotated_trace.
///
/// Arguments: top=N (0 = all rows).
class CacheOffenders : public AnalysisKernel
{
public:
	static constexpr const char* kName = "cache_offenders";

	explicit CacheOffenders(const StringTable& names) : AnalysisKernel(kName, names) {}

protected:
	void on_configure(const KernelArgs& args) override;
	void on_entry(const LogEntry& entry) override;
	Report on_finalize() override;

private:
	using Key = std::tuple<StringId, StringId, std::uint32_t>;
	struct Counts
	{
		std::uint64_t accesses = 0;
		std::uint64_t misses = 0;
	};

	std::map<Key, Counts> m_counts;
	std::uint64_t m_top = 0;
};

struct FieldCount
{
	std::string field;
	std::uint64_t accesses = 0;
};

struct FieldClass
{
	std::string field;
	std::uint64_t accesses = 0;
	bool hot = false;
};

/// A field is hot iff its count >= hot_ratio * mean count of the type's
/// fields. Order of the input is kept.
std::vector<FieldClass> classify_fields(const std::vector<FieldCount>& fields, double hot_ratio);

/// A type is live iff it has accesses and its share of all accesses is at
/// least live_fraction.
bool is_live(std::uint64_t type_accesses, std::uint64_t total_accesses, double live_fraction);

/// Hot/cold field classification for every live record type. Variables
/// named "Type.field" are attributed to Type.
///
/// Arguments: live_threshold=F (default 0.01), hot_ratio=R (default 2.0).
class StructSplitting : public AnalysisKernel
{
public:
	static constexpr const char* kName = "struct_splitting";
	static constexpr double kDefaultLiveThreshold = 0.01;
	static constexpr double kDefaultHotRatio = 2.0;

	explicit StructSplitting(const StringTable& names) : AnalysisKernel(kName, names) {}

protected:
	void on_configure(const KernelArgs& args) override;
	void on_entry(const LogEntry& entry) override;
	Report on_finalize() override;

private:
	std::map<StringId, std::uint64_t> m_counts;
	std::uint64_t m_total = 0;
	double m_live_threshold = kDefaultLiveThreshold;
	double m_hot_ratio = kDefaultHotRatio;
};

/// True iff the busiest thread made fewer than twice the accesses of the
/// second busiest. Fewer than two counts throws Errc::single_thread.
bool is_uniform(std::span<const std::uint64_t> per_thread_counts);

struct ThreadHistogram
{
	std::uint64_t address = 0;
	StringId variable = 0;
	std::map<ThreadId, std::uint64_t> counts;

	std::uint64_t total() const;
	/// Per-thread counts, descending.
	std::vector<std::uint64_t> sorted_counts() const;
};

std::string format_address(std::uint64_t address);

/// Shared-variable detection, first pass: per-address thread histograms,
/// dropping single-thread and non-uniform addresses, ranked by total.
///
/// Arguments: writes_only=bool, top=N (0 = all rows).
class SharedVarPhase1 : public AnalysisKernel
{
public:
	static constexpr const char* kName = "shared_var_phase1";

	explicit SharedVarPhase1(const StringTable& names) : AnalysisKernel(kName, names) {}

	/// Histograms surviving both filters, in report order.
	std::vector<ThreadHistogram> ranked() const;

protected:
	void on_configure(const KernelArgs& args) override;
	void on_entry(const LogEntry& entry) override;
	Report on_finalize() override;

private:
	using Key = std::tuple<std::uint64_t, StringId, ThreadId>;

	std::map<Key, std::uint64_t> m_counts;
	bool m_writes_only = false;
	std::uint64_t m_top = 0;
};

/// Shared-variable detection, second pass: source locations of the target
/// variable with per-thread counts.
///
/// Arguments: target=<variable name> or address=<hex,...>; without either
/// the top_k (default 1) addresses of the first pass are used. writes_only
/// as in the first pass. No matching access throws Errc::target_not_found.
class SharedVarPhase2 : public AnalysisKernel
{
public:
	static constexpr const char* kName = "shared_var_phase2";

	explicit SharedVarPhase2(const StringTable& names) : AnalysisKernel(kName, names) {}

protected:
	void on_configure(const KernelArgs& args) override;
	void on_entry(const LogEntry& entry) override;
	Report on_finalize() override;

private:
	using LocationKey = std::tuple<std::uint64_t, StringId, StringId, std::uint32_t>;

	std::optional<std::string> m_target_name;
	std::optional<StringId> m_target_var;
	std::set<std::uint64_t> m_target_addresses;
	std::uint64_t m_top_k = 1;
	bool m_writes_only = false;

	std::unique_ptr<SharedVarPhase1> m_phase1;
	std::map<LocationKey, std::map<ThreadId, std::uint64_t>> m_locations;
};

} // namespace tracekit
