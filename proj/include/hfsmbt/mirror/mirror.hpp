#pragma once

/// @file mirror.hpp
/// @brief Status bridge to operator consoles: WebSocket "/mirror" streaming
/// events and accepting commands, and "GET /world" serving the map.

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hfsmbt/hfsm/commands.hpp"
#include "hfsmbt/hfsm/events.hpp"
#include "hfsmbt/mirror/replay.hpp"
#include "json.hpp"

namespace hfsmbt::mirror {

struct MirrorConfig {
    std::string host = "127.0.0.1";
    std::uint16_t port = 7802;
    /// Queued bt_feedback frames per client before the oldest is dropped.
    std::size_t feedback_capacity = 64;
    /// Queued control frames per client before the client is disconnected.
    std::size_t control_capacity = 4096;
};

/// What a client receives first on connect.
struct Snapshot {
    std::uint64_t seq = 0;
    std::vector<std::string> active;
    hfsm::AutonomyLevel autonomy = hfsm::AutonomyLevel::High;
    std::optional<hfsm::MirrorEvent> last_feedback;
};

nlohmann::json to_json(const Snapshot& s);

/// Frames sent to a client: {"type":"snapshot",...} once, then one event
/// object per message, and {"type":"error",...} for a rejected inbound
/// message. Valid commands go to the command queue; the executive acks them.
class MirrorServer {
public:
    using WorldText = std::function<std::string()>;

    MirrorServer(hfsm::CommandQueue& commands, WorldText world, MirrorConfig config = {},
                 hfsm::AutonomyLevel initial = hfsm::AutonomyLevel::High);
    ~MirrorServer();
    MirrorServer(const MirrorServer&) = delete;
    MirrorServer& operator=(const MirrorServer&) = delete;

    /// Throws server::PortInUse or server::TransportError.
    void start();
    void stop();
    [[nodiscard]] std::uint16_t port() const;

    /// Non-blocking; safe from any thread. Usable as an EventSink.
    void publish(const hfsm::MirrorEvent& e);
    [[nodiscard]] hfsm::EventSink sink() {
        return [this](const hfsm::MirrorEvent& e) { publish(e); };
    }

    [[nodiscard]] Snapshot snapshot() const;
    [[nodiscard]] std::size_t clients() const;

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
};

/// Minimal WebSocket client for tests and headless tools.
class MirrorClient {
public:
    /// Throws server::TransportError.
    MirrorClient(const std::string& host, std::uint16_t port);
    ~MirrorClient();
    MirrorClient(const MirrorClient&) = delete;
    MirrorClient& operator=(const MirrorClient&) = delete;

    void send(const std::string& text);
    void send(const hfsm::OperatorCommand& c) { send(hfsm::to_json(c).dump()); }
    /// Next frame, or nullopt on timeout or once closed.
    std::optional<nlohmann::json> next(std::chrono::milliseconds timeout);
    [[nodiscard]] bool closed() const;
    void close();

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
};

/// Plain HTTP GET of the world map. Throws server::TransportError.
std::string fetch_world(const std::string& host, std::uint16_t port);

}  // namespace hfsmbt::mirror
