#include "hfsmbt/hfsm/commands.hpp"

#include <stdexcept>

#include "hfsmbt/hfsm/events.hpp"

namespace hfsmbt::hfsm {

using nlohmann::json;

std::string_view to_string(CommandType type) {
    switch (type) {
        case CommandType::SetAutonomy:
            return "set_autonomy";
        case CommandType::ConfirmTransition:
            return "confirm_transition";
        case CommandType::ForceTransition:
            return "force_transition";
        case CommandType::Preempt:
            return "preempt";
        case CommandType::ProvideGoal:
            return "provide_goal";
        case CommandType::EndGoals:
            return "end_goals";
    }
    return "unknown";
}

OperatorCommand OperatorCommand::set_autonomy(AutonomyLevel level) {
    OperatorCommand c;
    c.type = CommandType::SetAutonomy;
    c.level = level;
    return c;
}

OperatorCommand OperatorCommand::confirm(std::string state, std::string outcome) {
    OperatorCommand c;
    c.type = CommandType::ConfirmTransition;
    c.state = std::move(state);
    c.outcome = std::move(outcome);
    return c;
}

OperatorCommand OperatorCommand::force(std::string state, std::string outcome) {
    OperatorCommand c = confirm(std::move(state), std::move(outcome));
    c.type = CommandType::ForceTransition;
    return c;
}

OperatorCommand OperatorCommand::preempt() { return OperatorCommand{}; }

OperatorCommand OperatorCommand::provide_goal(PoseList poses) {
    OperatorCommand c;
    c.type = CommandType::ProvideGoal;
    c.poses = std::move(poses);
    return c;
}

OperatorCommand OperatorCommand::end_goals() {
    OperatorCommand c;
    c.type = CommandType::EndGoals;
    return c;
}

json to_json(const OperatorCommand& c) {
    json j{{"type", to_string(c.type)}};
    switch (c.type) {
        case CommandType::SetAutonomy:
            j["level"] = to_string(c.level);
            break;
        case CommandType::ConfirmTransition:
        case CommandType::ForceTransition:
            j["state"] = c.state;
            j["outcome"] = c.outcome;
            break;
        case CommandType::ProvideGoal: {
            auto arr = json::array();
            for (const auto& p : c.poses) {
                arr.push_back(pose_to_json(p));
            }
            j["poses"] = arr;
            break;
        }
        default:
            break;
    }
    return j;
}

OperatorCommand command_from_json(const json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("command must be a JSON object");
    }
    if (!j.contains("type") || !j["type"].is_string()) {
        throw std::invalid_argument("command needs a string field 'type'");
    }
    const auto type = j["type"].get<std::string>();
    auto text_field = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_string() || j[key].get<std::string>().empty()) {
            throw std::invalid_argument(type + " needs a non-empty string field '" + key + "'");
        }
        return j[key].get<std::string>();
    };
    if (type == "set_autonomy") {
        const auto level = parse_autonomy(text_field("level"));
        if (!level) {
            throw std::invalid_argument("level must be one of off, low, high, full");
        }
        return OperatorCommand::set_autonomy(*level);
    }
    if (type == "confirm_transition") {
        return OperatorCommand::confirm(text_field("state"), text_field("outcome"));
    }
    if (type == "force_transition") {
        return OperatorCommand::force(text_field("state"), text_field("outcome"));
    }
    if (type == "preempt") {
        return OperatorCommand::preempt();
    }
    if (type == "provide_goal") {
        if (!j.contains("poses") || !j["poses"].is_array() || j["poses"].empty()) {
            throw std::invalid_argument("provide_goal needs a non-empty array 'poses'");
        }
        PoseList poses;
        for (const auto& p : j["poses"]) {
            poses.push_back(pose_from_json(p));
        }
        return OperatorCommand::provide_goal(std::move(poses));
    }
    if (type == "end_goals") {
        return OperatorCommand::end_goals();
    }
    throw std::invalid_argument("unknown command type '" + type + "'");
}

void CommandQueue::push(OperatorCommand c) {
    {
        std::lock_guard lock(mutex_);
        queue_.push_back(std::move(c));
    }
    cv_.notify_all();
}

std::vector<OperatorCommand> CommandQueue::drain() {
    std::lock_guard lock(mutex_);
    std::vector<OperatorCommand> out(std::make_move_iterator(queue_.begin()), std::make_move_iterator(queue_.end()));
    queue_.clear();
    return out;
}

bool CommandQueue::wait_for(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    return cv_.wait_for(lock, timeout, [&] { return !queue_.empty(); });
}

bool CommandQueue::empty() const {
    std::lock_guard lock(mutex_);
    return queue_.empty();
}

}  // namespace hfsmbt::hfsm
