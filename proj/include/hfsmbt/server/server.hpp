#pragma once

/// @file server.hpp
/// @brief Behavior-tree server: stores trees by behavior name and executes one at a time.
///
/// The blackboard lives as long as the server. It is shared by every
/// execution and is not cleared when behaviors are (re)loaded, which is how a
/// planner tree hands its "path" to a controller tree.
///
/// Goal poses are written before the first tick: one pose to "goal"; two or
/// more to "goals" (pose list) with "goal" set to the first.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "hfsmbt/bt/blackboard.hpp"
#include "hfsmbt/bt/node.hpp"
#include "hfsmbt/bt/registry.hpp"
#include "hfsmbt/server/messages.hpp"
#include "hfsmbt/server/net.hpp"

namespace hfsmbt::server {

struct ServerConfig {
    std::string host = "127.0.0.1";
    std::uint16_t port = 7801;
    std::chrono::milliseconds tick_period{100};
    /// Feedback messages buffered per connection before the oldest is dropped.
    std::size_t feedback_capacity = 64;
    /// Relative file names in load goals are resolved against this directory.
    std::string behavior_dir;
};

/// Called on the execution thread around every tick.
struct TickHooks {
    std::function<void(bt::Blackboard&)> before;
    std::function<void(bt::Blackboard&)> after;
};

/// Observes every line sent or received (outbound = true for sent).
using WireTap = std::function<void(bool outbound, const std::string& line)>;

class BtServer {
public:
    BtServer(const bt::LeafRegistry& registry, ServerConfig config = {}, TickHooks hooks = {});
    ~BtServer();
    BtServer(const BtServer&) = delete;
    BtServer& operator=(const BtServer&) = delete;

    /// Binds and starts accepting. Throws PortInUse.
    void start();
    /// Cancels a running execution (its client receives CANCELED), then
    /// closes every connection.
    void stop();
    [[nodiscard]] std::uint16_t port() const { return port_; }

    /// Loads files directly, with the same result as a bt_load_goal.
    Message handle_load(const Message& goal);
    [[nodiscard]] std::vector<std::string> behaviors() const;
    [[nodiscard]] bt::Blackboard& blackboard() { return blackboard_; }
    [[nodiscard]] bool busy() const { return busy_.load(); }

    void set_tap(WireTap tap);

private:
    struct Connection;
    struct Execution;

    void accept_loop();
    void serve(const std::shared_ptr<Connection>& conn);
    void dispatch(const std::shared_ptr<Connection>& conn, const Message& msg);
    void start_execution(const std::shared_ptr<Connection>& conn, const Message& goal);
    void run_execution(const std::shared_ptr<Execution>& ex);
    void cancel_execution(const std::string& id, const Connection* owner);
    void finish_connection(const std::shared_ptr<Connection>& conn);
    void send(Connection& conn, const Message& msg, bool droppable);

    const bt::LeafRegistry& registry_;
    ServerConfig config_;
    TickHooks hooks_;
    bt::Blackboard blackboard_;

    mutable std::mutex store_mutex_;
    std::map<std::string, bt::BtNode> trees_;

    std::unique_ptr<Listener> listener_;
    std::uint16_t port_ = 0;
    std::atomic<bool> running_{false};
    std::thread accept_thread_;

    std::mutex conn_mutex_;
    std::list<std::shared_ptr<Connection>> connections_;

    std::mutex exec_mutex_;
    std::atomic<bool> busy_{false};
    std::shared_ptr<Execution> execution_;
    std::thread exec_thread_;

    std::mutex tap_mutex_;
    WireTap tap_;
};

}  // namespace hfsmbt::server
