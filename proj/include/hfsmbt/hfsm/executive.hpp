#pragma once

/// @file executive.hpp
/// @brief Single-threaded executive loop driving a root state machine.

#include <atomic>
#include <chrono>
#include <mutex>
#include <string>
#include <vector>

#include "hfsmbt/hfsm/commands.hpp"
#include "hfsmbt/hfsm/machine.hpp"

namespace hfsmbt::hfsm {

/// Machine outcomes treated as a successful end of a behavior.
bool is_finished_outcome(const std::string& outcome);

inline constexpr const char* kPreempted = "preempted";

struct ExecutiveConfig {
    std::chrono::milliseconds period{100};
    AutonomyLevel autonomy = AutonomyLevel::High;
};

/// Per cycle: drain operator commands, then run one step of the root machine.
/// Events get a gapless seq and a timestamp relative to the start of
/// execute() and are handed to every sink on the executive thread, so sinks
/// must not block.
class Executive : public Supervisor {
public:
    Executive(StateMachine& root, CommandQueue& commands, ExecutiveConfig config = {});

    void add_sink(EventSink sink);

    /// Runs until the root machine reaches an outcome or a preempt arrives
    /// ("preempted"). Throws HfsmError on an invalid machine or state error.
    std::string execute(UserData initial = {});

    void emit(MirrorEvent event) override;
    [[nodiscard]] AutonomyLevel autonomy() const override { return autonomy_.load(); }
    [[nodiscard]] GoalMailbox& goals() override { return goals_; }
    [[nodiscard]] std::chrono::milliseconds period() const override { return config_.period; }

    /// Active state paths, outermost first; safe to call from any thread.
    [[nodiscard]] std::vector<std::string> active_path() const;
    [[nodiscard]] const UserData& userdata() const { return userdata_; }

private:
    bool process(const OperatorCommand& cmd);
    void refresh_active();

    StateMachine& root_;
    CommandQueue& commands_;
    ExecutiveConfig config_;
    std::atomic<AutonomyLevel> autonomy_;
    std::vector<EventSink> sinks_;
    std::uint64_t next_seq_ = 1;
    std::chrono::steady_clock::time_point start_;
    GoalMailbox goals_;
    UserData userdata_;
    mutable std::mutex active_mutex_;
    std::vector<std::string> active_;
};

}  // namespace hfsmbt::hfsm
