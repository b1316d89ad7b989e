#pragma once

/// @file client.hpp
/// @brief Client side of the behavior-tree server protocol.

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hfsmbt/server/messages.hpp"
#include "hfsmbt/server/net.hpp"

namespace hfsmbt::server {

/// One connection. Not thread-safe; meant to be used from one thread.
class BtClient {
public:
    /// Throws TransportError when the server cannot be reached.
    BtClient(const std::string& host, std::uint16_t port,
             std::chrono::milliseconds connect_timeout = std::chrono::milliseconds(2000));

    void send(const Message& m);
    /// Non-blocking. Throws TransportError if the connection is gone.
    std::optional<Message> poll();
    /// Blocks up to @p timeout.
    std::optional<Message> wait(std::chrono::milliseconds timeout);

    /// Sends a load goal and waits for its result. Throws TransportError,
    /// including on timeout.
    Message load(const std::vector<std::string>& files, std::chrono::milliseconds timeout);

    /// Sends an execute goal and blocks until its result or rejection. The
    /// feedback callback may return true to request cancellation (sent once).
    Message execute(const std::string& behavior, const PoseList& goals,
                    const std::function<bool(const Message&)>& on_feedback, std::chrono::milliseconds timeout);

    /// Fresh goal id, unique per client.
    std::string next_id(const std::string& prefix);

    /// Every line sent (outbound = true) or received.
    void set_tap(std::function<void(bool, const std::string&)> tap) { tap_ = std::move(tap); }

    void close() { socket_.close(); }

private:
    LineSocket socket_;
    std::uint64_t counter_ = 0;
    std::string tag_;
    std::function<void(bool, const std::string&)> tap_;
};

}  // namespace hfsmbt::server
