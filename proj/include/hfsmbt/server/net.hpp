#pragma once

/// @file net.hpp
/// @brief Blocking TCP sockets carrying newline-delimited text.

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

namespace hfsmbt::server {

/// Connection failures, as opposed to protocol-level failures.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PortInUse : public TransportError {
public:
    explicit PortInUse(std::uint16_t port);
    [[nodiscard]] std::uint16_t port() const noexcept { return port_; }

private:
    std::uint16_t port_;
};

/// Owns a connected socket. Writes are serialized; reads are meant for a
/// single reader thread.
class LineSocket {
public:
    LineSocket() = default;
    explicit LineSocket(int fd) : fd_(fd) {}
    ~LineSocket();
    LineSocket(LineSocket&& other) noexcept;
    LineSocket& operator=(LineSocket&& other) noexcept;
    LineSocket(const LineSocket&) = delete;
    LineSocket& operator=(const LineSocket&) = delete;

    static LineSocket connect(const std::string& host, std::uint16_t port,
                              std::chrono::milliseconds timeout = std::chrono::milliseconds(2000));

    [[nodiscard]] bool is_open() const { return fd_ >= 0; }
    /// Appends '\n'. Throws TransportError.
    void send_line(const std::string& line);
    /// Waits up to @p timeout (zero = poll). Returns nullopt on timeout;
    /// throws TransportError when the peer has closed or on error.
    std::optional<std::string> read_line(std::chrono::milliseconds timeout);
    /// Shuts both directions down; a blocked reader wakes with an error.
    void shutdown();
    void close();

private:
    int fd_ = -1;
    std::string buffer_;
    std::mutex write_mutex_;
};

/// Listening socket on 127.0.0.1 (or the given host).
class Listener {
public:
    /// Port 0 picks a free port. Throws PortInUse or TransportError.
    Listener(const std::string& host, std::uint16_t port);
    ~Listener();
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;

    [[nodiscard]] std::uint16_t port() const { return port_; }
    /// Waits up to @p timeout for a connection.
    std::optional<LineSocket> accept(std::chrono::milliseconds timeout);
    void close();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

}  // namespace hfsmbt::server
