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

#include "fd.hpp"

#include <cerrno>
#include <cstring>
#include <sys/socket.h>
#include <unistd.h>

#include "tracekit/error.hpp"

namespace tracekit::detail {

std::string errno_message(int err)
{
	return std::strerror(err);
}

Fd& Fd::operator=(Fd&& other) noexcept
{
	if(this != &other)
	{
		reset(other.release());
	}
	return *this;
}

int Fd::release()
{
	const int fd = m_fd;
	m_fd = -1;
	return fd;
}

void Fd::reset(int fd)
{
	if(m_fd >= 0)
	{
		::close(m_fd);
	}
	m_fd = fd;
}

void Fd::write_all(std::span<const std::uint8_t> bytes, const std::string& what)
{
	while(!bytes.empty())
	{
		// send() with MSG_NOSIGNAL on sockets so a vanished peer is an error,
		// not SIGPIPE; plain write() for everything else.
		ssize_t n = ::send(m_fd, bytes.data(), bytes.size(), MSG_NOSIGNAL);
		if(n < 0 && errno == ENOTSOCK)
		{
			n = ::write(m_fd, bytes.data(), bytes.size());
		}
		if(n < 0)
		{
			if(errno == EINTR)
			{
				continue;
			}
			fail(Errc::io_error, what + ": " + errno_message(errno));
		}
		bytes = bytes.subspan(static_cast<std::size_t>(n));
	}
}

std::size_t Fd::read_some(std::span<std::uint8_t> bytes, bool& reset, const std::string& what)
{
	reset = false;
	while(true)
	{
		const ssize_t n = ::read(m_fd, bytes.data(), bytes.size());
		if(n >= 0)
		{
			return static_cast<std::size_t>(n);
		}
		if(errno == EINTR)
		{
			continue;
		}
		if(errno == ECONNRESET)
		{
			reset = true;
			return 0;
		}
		fail(Errc::io_error, what + ": " + errno_message(errno));
	}
}

} // namespace tracekit::detail
