#include "hfsmbt/hfsm/events.hpp"

#include <sstream>
#include <stdexcept>

namespace hfsmbt::hfsm {

using nlohmann::json;

namespace {

constexpr std::pair<EventKind, std::string_view> kKinds[] = {
    {EventKind::BehaviorStarted, "behavior_started"}, {EventKind::StateEntered, "state_entered"},
    {EventKind::StateExited, "state_exited"},         {EventKind::OutcomeEmitted, "outcome_emitted"},
    {EventKind::TransitionBlocked, "transition_blocked"}, {EventKind::AutonomyChanged, "autonomy_changed"},
    {EventKind::BtFeedback, "bt_feedback"},           {EventKind::BehaviorFinished, "behavior_finished"},
    {EventKind::CommandAck, "command_ack"},
};

AutonomyLevel level_field(const json& j, const char* key) {
    const auto level = parse_autonomy(j.at(key).get<std::string>());
    if (!level) {
        throw std::invalid_argument(std::string("bad autonomy level in ") + key);
    }
    return *level;
}

}  // namespace

std::string_view to_string(EventKind kind) {
    for (const auto& [k, name] : kKinds) {
        if (k == kind) {
            return name;
        }
    }
    return "unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
    for (const auto& [k, name] : kKinds) {
        if (name == text) {
            return k;
        }
    }
    return std::nullopt;
}

json pose_to_json(const Pose& p) { return json{{"x", p.x}, {"y", p.y}, {"heading", p.heading}}; }

Pose pose_from_json(const json& j) {
    if (!j.is_object() || !j.contains("x") || !j.contains("y") || !j["x"].is_number() || !j["y"].is_number()) {
        throw std::invalid_argument("pose needs numeric x and y");
    }
    Pose p{j["x"].get<double>(), j["y"].get<double>(), 0.0};
    if (j.contains("heading")) {
        if (!j["heading"].is_number()) {
            throw std::invalid_argument("pose heading must be a number");
        }
        p.heading = j["heading"].get<double>();
    }
    return p;
}

json to_json(const MirrorEvent& e) {
    json j{{"seq", e.seq}, {"timestamp_ms", e.timestamp_ms}, {"kind", to_string(e.kind)}};
    switch (e.kind) {
        case EventKind::BehaviorStarted:
            j["name"] = e.name;
            break;
        case EventKind::StateEntered:
        case EventKind::StateExited:
            j["state"] = e.state;
            break;
        case EventKind::OutcomeEmitted:
            j["state"] = e.state;
            j["outcome"] = e.outcome;
            j["forced"] = e.forced;
            j["confirmed"] = e.confirmed;
            break;
        case EventKind::TransitionBlocked:
            j["state"] = e.state;
            j["outcome"] = e.outcome;
            j["required_level"] = to_string(e.required_level);
            break;
        case EventKind::AutonomyChanged:
            j["level"] = to_string(e.level);
            break;
        case EventKind::BtFeedback:
            j["state"] = e.state;
            j["active_nodes"] = e.active_nodes;
            j["robot_pose"] = e.robot_pose ? pose_to_json(*e.robot_pose) : json(nullptr);
            j["elapsed_ms"] = e.elapsed_ms;
            break;
        case EventKind::BehaviorFinished:
            j["outcome"] = e.outcome;
            break;
        case EventKind::CommandAck:
            j["command"] = e.command;
            if (!e.error.empty()) {
                j["error"] = e.error;
            }
            break;
    }
    return j;
}

MirrorEvent event_from_json(const json& j) {
    try {
        MirrorEvent e;
        const auto kind = parse_event_kind(j.at("kind").get<std::string>());
        if (!kind) {
            throw std::invalid_argument("unknown event kind");
        }
        e.kind = *kind;
        e.seq = j.at("seq").get<std::uint64_t>();
        e.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
        e.name = j.value("name", "");
        e.state = j.value("state", "");
        e.outcome = j.value("outcome", "");
        e.forced = j.value("forced", false);
        e.confirmed = j.value("confirmed", false);
        if (j.contains("required_level")) {
            e.required_level = level_field(j, "required_level");
        }
        if (j.contains("level")) {
            e.level = level_field(j, "level");
        }
        if (j.contains("active_nodes")) {
            e.active_nodes = j["active_nodes"].get<std::vector<std::string>>();
        }
        if (j.contains("robot_pose") && !j["robot_pose"].is_null()) {
            e.robot_pose = pose_from_json(j["robot_pose"]);
        }
        e.elapsed_ms = j.value("elapsed_ms", std::int64_t{0});
        if (j.contains("command")) {
            e.command = j["command"];
        }
        e.error = j.value("error", "");
        return e;
    } catch (const json::exception& ex) {
        throw std::invalid_argument(ex.what());
    }
}

void EventLog::record(const MirrorEvent& e) {
    std::lock_guard lock(mutex_);
    events_.push_back(e);
}

std::vector<MirrorEvent> EventLog::events() const {
    std::lock_guard lock(mutex_);
    return events_;
}

std::size_t EventLog::size() const {
    std::lock_guard lock(mutex_);
    return events_.size();
}

std::size_t EventLog::count(EventKind kind) const {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(
        std::count_if(events_.begin(), events_.end(), [&](const MirrorEvent& e) { return e.kind == kind; }));
}

std::string EventLog::to_jsonl() const {
    std::ostringstream out;
    for (const auto& e : events()) {
        out << to_json(e).dump() << '\n';
    }
    return out.str();
}

EventSink EventLog::sink() {
    return [this](const MirrorEvent& e) { record(e); };
}

}  // namespace hfsmbt::hfsm
