#pragma once

/// @file commands.hpp
/// @brief Operator commands and the queue that carries them to the executive.

#include <condition_variable>
#include <deque>
#include <mutex>
#include <string>
#include <vector>

#include "hfsmbt/core/value.hpp"
#include "hfsmbt/hfsm/autonomy.hpp"
#include "json.hpp"

namespace hfsmbt::hfsm {

enum class CommandType {
    SetAutonomy,
    ConfirmTransition,
    ForceTransition,
    Preempt,
    /// Hands goal poses to a waiting GetGoal state.
    ProvideGoal,
    /// Tells GetGoal that no more goals will come.
    EndGoals,
};

std::string_view to_string(CommandType type);

struct OperatorCommand {
    CommandType type = CommandType::Preempt;
    AutonomyLevel level = AutonomyLevel::Off;
    std::string state;
    std::string outcome;
    PoseList poses;

    static OperatorCommand set_autonomy(AutonomyLevel level);
    static OperatorCommand confirm(std::string state, std::string outcome);
    static OperatorCommand force(std::string state, std::string outcome);
    static OperatorCommand preempt();
    static OperatorCommand provide_goal(PoseList poses);
    static OperatorCommand end_goals();
};

/// Wire form: {"type": "set_autonomy", "level": "high"},
/// {"type": "confirm_transition" | "force_transition", "state": .., "outcome": ..},
/// {"type": "preempt"}, {"type": "provide_goal", "poses": [pose...]},
/// {"type": "end_goals"}.
nlohmann::json to_json(const OperatorCommand& c);
/// Throws std::invalid_argument with a readable reason.
OperatorCommand command_from_json(const nlohmann::json& j);

/// Multi-producer queue drained by the executive once per cycle.
class CommandQueue {
public:
    void push(OperatorCommand c);
    [[nodiscard]] std::vector<OperatorCommand> drain();
    /// Waits up to @p timeout for a command to be available.
    bool wait_for(std::chrono::milliseconds timeout);
    [[nodiscard]] bool empty() const;

private:
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<OperatorCommand> queue_;
};

}  // namespace hfsmbt::hfsm
