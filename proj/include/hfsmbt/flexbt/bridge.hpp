#pragma once

/// @file bridge.hpp
/// @brief HFSM states that load and run behavior trees on a BT server.

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hfsmbt/hfsm/state.hpp"
#include "hfsmbt/server/client.hpp"

namespace hfsmbt::flexbt {

struct BridgeConfig {
    std::string host = "127.0.0.1";
    std::uint16_t port = 7801;
    /// Execute states only.
    std::string behavior_name;
    /// Loader state only.
    std::vector<std::string> files;
    /// Goal state only: userdata key holding a Pose or PoseList.
    std::string goal_key = "goal";
    /// No message from the server for this long counts as lost.
    std::chrono::milliseconds feedback_timeout{2000};
};

/// Lazily opened connection shared by the lifecycle calls of one state.
class Connection {
public:
    explicit Connection(const BridgeConfig& config) : config_(config) {}
    /// Throws server::TransportError.
    server::BtClient& get();
    void reset() { client_.reset(); }
    [[nodiscard]] bool open() const { return client_.has_value(); }

private:
    const BridgeConfig& config_;
    std::optional<server::BtClient> client_;
};

/// Outcomes {done, failed}. On failure the output key "load_errors" holds one
/// "file: message" line per error.
class BtLoaderState : public hfsm::State {
public:
    BtLoaderState(std::string name, BridgeConfig config);

    void on_enter(hfsm::StateContext& ctx) override;
    std::optional<std::string> execute(hfsm::StateContext& ctx) override;
    void on_exit(hfsm::StateContext& ctx) override;

private:
    BridgeConfig config_;
    Connection conn_;
    std::string id_;
    bool failed_ = false;
    std::chrono::steady_clock::time_point deadline_;
};

/// Outcomes {done, failed, canceled}, mapped from SUCCESS, FAILURE and
/// CANCELED. Feedback is republished as bt_feedback events. Leaving the state
/// before the result arrives (preempt or forced transition) sends one cancel
/// and waits for the result up to the feedback timeout.
class BtExecuteState : public hfsm::State {
public:
    BtExecuteState(std::string name, BridgeConfig config);

    void on_enter(hfsm::StateContext& ctx) override;
    std::optional<std::string> execute(hfsm::StateContext& ctx) override;
    void on_exit(hfsm::StateContext& ctx) override;
    void on_preempt(hfsm::StateContext& ctx) override;

    [[nodiscard]] int cancels_sent() const { return cancels_; }

protected:
    BtExecuteState(std::string name, BridgeConfig config, std::vector<std::string> inputs);
    /// Goal poses for the request; nullopt fails the state without traffic.
    virtual std::optional<PoseList> goals(hfsm::StateContext&) { return PoseList{}; }
    const BridgeConfig& config() const { return config_; }

private:
    std::optional<std::string> handle(const server::Message& m, hfsm::StateContext& ctx);
    void abandon(hfsm::StateContext& ctx);

    BridgeConfig config_;
    Connection conn_;
    std::string id_;
    bool in_flight_ = false;
    std::optional<std::string> early_;
    std::chrono::steady_clock::time_point last_heard_;
    int cancels_ = 0;
};

/// BtExecuteState whose goal carries the pose(s) found under the goal key.
class BtExecuteGoalState : public BtExecuteState {
public:
    BtExecuteGoalState(std::string name, BridgeConfig config);

protected:
    std::optional<PoseList> goals(hfsm::StateContext& ctx) override;
};

}  // namespace hfsmbt::flexbt
