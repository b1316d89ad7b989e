#pragma once

/// @file messages.hpp
/// @brief Wire messages of the behavior-tree server (one JSON object per line).

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hfsmbt/core/value.hpp"

namespace hfsmbt::server {

enum class MessageType {
    LoadGoal,
    LoadResult,
    ExecuteGoal,
    ExecuteFeedback,
    ExecuteCancel,
    ExecuteResult,
    Reject,
};

/// "bt_load_goal", "bt_load_result", ...
std::string_view to_string(MessageType type);

enum class BtOutcome { Success, Failure, Canceled };

/// "SUCCESS", "FAILURE", "CANCELED".
std::string_view to_string(BtOutcome outcome);

struct LoadError {
    std::string file;
    std::string message;

    friend bool operator==(const LoadError&, const LoadError&) = default;
};

/// Union of all message payloads; fields unused by a type stay empty.
///
///   bt_load_goal         id, files
///   bt_load_result       id, loaded, errors
///   bt_execute_goal      id, behavior_name, goals
///   bt_execute_feedback  id, active_nodes, robot_pose, elapsed_ms, feedback_dropped
///   bt_execute_cancel    id
///   bt_execute_result    id, outcome, error (empty unless the server reports a reason)
///   bt_reject            id, reason
struct Message {
    MessageType type = MessageType::Reject;
    std::string id;
    std::vector<std::string> files;
    std::vector<std::string> loaded;
    std::vector<LoadError> errors;
    std::string behavior_name;
    PoseList goals;
    std::vector<std::string> active_nodes;
    std::optional<Pose> robot_pose;
    std::int64_t elapsed_ms = 0;
    std::uint64_t feedback_dropped = 0;
    BtOutcome outcome = BtOutcome::Failure;
    std::string error;
    std::string reason;

    static Message load_goal(std::string id, std::vector<std::string> files);
    static Message execute_goal(std::string id, std::string behavior_name, PoseList goals = {});
    static Message cancel(std::string id);
    static Message result(std::string id, BtOutcome outcome, std::string error = {});
    static Message reject(std::string id, std::string reason);
};

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Compact JSON without a newline.
std::string encode(const Message& m);
/// Throws ProtocolError on malformed JSON, unknown type or missing fields.
Message decode(std::string_view line);

}  // namespace hfsmbt::server
