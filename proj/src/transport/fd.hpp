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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace tracekit::detail {

/// Owning POSIX descriptor.
class Fd
{
public:
	Fd() = default;
	explicit Fd(int fd) : m_fd(fd) {}
	Fd(Fd&& other) noexcept : m_fd(other.release()) {}
	Fd& operator=(Fd&& other) noexcept;
	Fd(const Fd&) = delete;
	Fd& operator=(const Fd&) = delete;
	~Fd() { reset(); }

	int get() const { return m_fd; }
	bool valid() const { return m_fd >= 0; }
	int release();
	void reset(int fd = -1);

	/// Writes everything, retrying on EINTR and short writes. Blocks while
	/// the peer is not reading. Throws Errc::io_error.
	void write_all(std::span<const std::uint8_t> bytes, const std::string& what);

	/// Returns bytes read, 0 at end of stream. ECONNRESET reads as end of
	/// stream with `reset` set.
	std::size_t read_some(std::span<std::uint8_t> bytes, bool& reset, const std::string& what);

private:
	int m_fd = -1;
};

std::string errno_message(int err);

} // namespace tracekit::detail
