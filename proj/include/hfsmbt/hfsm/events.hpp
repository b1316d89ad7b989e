#pragma once

/// @file events.hpp
/// @brief Execution events published by the executive.

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hfsmbt/core/value.hpp"
#include "hfsmbt/hfsm/autonomy.hpp"
#include "json.hpp"

namespace hfsmbt::hfsm {

enum class EventKind {
    BehaviorStarted,
    StateEntered,
    StateExited,
    OutcomeEmitted,
    TransitionBlocked,
    AutonomyChanged,
    BtFeedback,
    BehaviorFinished,
    CommandAck,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

/// Control-flow events are never dropped by the mirror; bt_feedback may be.
constexpr bool is_control_event(EventKind k) { return k != EventKind::BtFeedback; }

/// One event. Which payload fields are meaningful depends on kind:
///   behavior_started   name
///   state_entered      state
///   state_exited       state
///   outcome_emitted    state, outcome, forced, confirmed
///   transition_blocked state, outcome, required_level
///   autonomy_changed   level
///   bt_feedback        state, active_nodes, robot_pose, elapsed_ms
///   behavior_finished  outcome
///   command_ack        command (the command as received), error (if rejected)
/// State names are paths from the root machine, e.g. "/Navigate/Plan".
struct MirrorEvent {
    std::uint64_t seq = 0;
    std::int64_t timestamp_ms = 0;
    EventKind kind = EventKind::BehaviorStarted;

    std::string name;
    std::string state;
    std::string outcome;
    bool forced = false;
    bool confirmed = false;
    AutonomyLevel required_level = AutonomyLevel::Off;
    AutonomyLevel level = AutonomyLevel::Off;
    std::vector<std::string> active_nodes;
    std::optional<Pose> robot_pose;
    std::int64_t elapsed_ms = 0;
    nlohmann::json command;
    std::string error;
};

nlohmann::json to_json(const MirrorEvent& e);
/// Throws std::invalid_argument on a malformed object.
MirrorEvent event_from_json(const nlohmann::json& j);

nlohmann::json pose_to_json(const Pose& p);
/// Throws std::invalid_argument unless x, y (and optional heading) are numbers.
Pose pose_from_json(const nlohmann::json& j);

using EventSink = std::function<void(const MirrorEvent&)>;

/// Thread-safe capture of every event, used for session logs and tests.
class EventLog {
public:
    void record(const MirrorEvent& e);
    [[nodiscard]] std::vector<MirrorEvent> events() const;
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::size_t count(EventKind kind) const;
    /// One JSON object per line.
    [[nodiscard]] std::string to_jsonl() const;
    [[nodiscard]] EventSink sink();

private:
    mutable std::mutex mutex_;
    std::vector<MirrorEvent> events_;
};

}  // namespace hfsmbt::hfsm
