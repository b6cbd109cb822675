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

#include <arpa/inet.h>
#include <cerrno>
#include <charconv>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <thread>
#include <unistd.h>
#include <utility>

#include "streams.hpp"
#include "tracekit/error.hpp"

namespace tracekit {

namespace {

sockaddr_in resolve(const Endpoint& endpoint)
{
	sockaddr_in addr{};
	addr.sin_family = AF_INET;
	addr.sin_port = htons(endpoint.port);
	const std::string host = endpoint.host.empty() || endpoint.host == "localhost" ? "127.0.0.1" : endpoint.host;
	if(::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1)
	{
		return addr;
	}

	addrinfo hints{};
	hints.ai_family = AF_INET;
	hints.ai_socktype = SOCK_STREAM;
	addrinfo* res = nullptr;
	if(::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr)
	{
		fail(Errc::config_error, "cannot resolve host \"" + host + "\"");
	}
	addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
	::freeaddrinfo(res);
	return addr;
}

} // namespace

namespace detail {

Fd connect_to(const Endpoint& endpoint, std::chrono::milliseconds wait)
{
	const auto addr = resolve(endpoint);
	const auto deadline = std::chrono::steady_clock::now() + wait;
	while(true)
	{
		Fd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
		if(!fd.valid())
		{
			fail(Errc::io_error, "socket: " + errno_message(errno));
		}
		if(::connect(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) == 0)
		{
			return fd;
		}
		const int err = errno;
		if(err == EINTR)
		{
			continue;
		}
		if(std::chrono::steady_clock::now() >= deadline)
		{
			fail(err == ECONNREFUSED ? Errc::connection_refused : Errc::io_error, "connect " + endpoint.to_string() + ": " + errno_message(err));
		}
		std::this_thread::sleep_for(std::chrono::milliseconds(20));
	}
}

} // namespace detail

Endpoint Endpoint::parse(std::string_view text)
{
	const auto colon = text.rfind(':');
	if(colon == std::string_view::npos)
	{
		fail(Errc::config_error, "endpoint \"" + std::string(text) + "\" is not host:port");
	}
	Endpoint ep;
	if(colon > 0)
	{
		ep.host = std::string(text.substr(0, colon));
	}
	const auto port = text.substr(colon + 1);
	unsigned value = 0;
	auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
	if(port.empty() || ec != std::errc() || ptr != port.data() + port.size() || value > 65535)
	{
		fail(Errc::config_error, "bad port in endpoint \"" + std::string(text) + "\"");
	}
	ep.port = static_cast<std::uint16_t>(value);
	return ep;
}

std::string Endpoint::to_string() const
{
	return host + ":" + std::to_string(port);
}

TcpListener::TcpListener(int fd, std::string host, std::uint16_t port) :
	m_fd(fd), m_host(std::move(host)), m_port(port)
{
}

TcpListener::TcpListener(TcpListener&& other) noexcept :
	m_fd(std::exchange(other.m_fd, -1)), m_host(std::move(other.m_host)), m_port(other.m_port)
{
}

TcpListener& TcpListener::operator=(TcpListener&& other) noexcept
{
	if(this != &other)
	{
		if(m_fd >= 0)
		{
			::close(m_fd);
		}
		m_fd = std::exchange(other.m_fd, -1);
		m_host = std::move(other.m_host);
		m_port = other.m_port;
	}
	return *this;
}

TcpListener::~TcpListener()
{
	if(m_fd >= 0)
	{
		::close(m_fd);
	}
}

TcpListener TcpListener::bind(const Endpoint& endpoint)
{
	auto addr = resolve(endpoint);
	detail::Fd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
	if(!fd.valid())
	{
		fail(Errc::io_error, "socket: " + detail::errno_message(errno));
	}
	const int one = 1;
	::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
	if(::bind(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0)
	{
		fail(Errc::io_error, "bind " + endpoint.to_string() + ": " + detail::errno_message(errno));
	}
	if(::listen(fd.get(), 1) != 0)
	{
		fail(Errc::io_error, "listen " + endpoint.to_string() + ": " + detail::errno_message(errno));
	}
	socklen_t len = sizeof(addr);
	::getsockname(fd.get(), reinterpret_cast<sockaddr*>(&addr), &len);
	return TcpListener(fd.release(), endpoint.host, ntohs(addr.sin_port));
}

Endpoint TcpListener::endpoint() const
{
	return Endpoint{m_host, m_port};
}

std::unique_ptr<EntrySource> TcpListener::accept()
{
	while(true)
	{
		const int client = ::accept4(m_fd, nullptr, nullptr, SOCK_CLOEXEC);
		if(client >= 0)
		{
			return std::make_unique<detail::BinaryFdSource>(detail::Fd(client), "tcp " + endpoint().to_string());
		}
		if(errno != EINTR)
		{
			fail(Errc::io_error, "accept: " + detail::errno_message(errno));
		}
	}
}

std::size_t serve_trace(EntrySource& source, const Endpoint& endpoint, std::chrono::milliseconds connect_wait, std::size_t buffer_entries)
{
	SinkConfig cfg;
	cfg.destination = endpoint;
	cfg.buffer_entries = buffer_entries;
	cfg.connect_wait = connect_wait;
	auto sink = open_sink(cfg);
	std::size_t sent = 0;
	while(auto e = source.next())
	{
		sink->write(*e);
		++sent;
	}
	sink->close();
	return sent;
}

std::vector<LogEntry> receive_trace(TcpListener& listener)
{
	auto source = listener.accept();
	return drain(*source);
}

} // namespace tracekit
