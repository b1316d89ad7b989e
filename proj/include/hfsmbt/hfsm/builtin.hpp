#pragma once

/// @file builtin.hpp
/// @brief States that need no server: operator goal input and a timed wait.

#include <chrono>
#include <optional>

#include "hfsmbt/hfsm/state.hpp"

namespace hfsmbt::hfsm {

/// Waits for goals from provide_goal commands. Outcome "received" writes the
/// output key (a pose for a single goal, a pose list otherwise); "finished"
/// once end_goals has been given and no goals remain.
class GetGoalState : public State {
public:
    explicit GetGoalState(std::string name = "GetGoal", std::string output_key = "goal");
    std::optional<std::string> execute(StateContext& ctx) override;

private:
    std::string key_;
};

/// Returns "done" after the given duration.
class WaitState : public State {
public:
    WaitState(std::string name, std::chrono::milliseconds duration);
    void on_enter(StateContext& ctx) override;
    std::optional<std::string> execute(StateContext& ctx) override;

private:
    std::chrono::milliseconds duration_;
    std::chrono::steady_clock::time_point until_;
};

}  // namespace hfsmbt::hfsm
