#include "hfsmbt/server/messages.hpp"

#include "json.hpp"

namespace hfsmbt::server {

using nlohmann::json;

namespace {

constexpr std::pair<MessageType, std::string_view> kTypes[] = {
    {MessageType::LoadGoal, "bt_load_goal"},
    {MessageType::LoadResult, "bt_load_result"},
    {MessageType::ExecuteGoal, "bt_execute_goal"},
    {MessageType::ExecuteFeedback, "bt_execute_feedback"},
    {MessageType::ExecuteCancel, "bt_execute_cancel"},
    {MessageType::ExecuteResult, "bt_execute_result"},
    {MessageType::Reject, "bt_reject"},
};

json pose_json(const Pose& p) { return json{{"x", p.x}, {"y", p.y}, {"heading", p.heading}}; }

Pose pose_from(const json& j) {
    if (!j.is_object() || !j.contains("x") || !j.contains("y") || !j["x"].is_number() || !j["y"].is_number()) {
        throw ProtocolError("pose needs numeric x and y");
    }
    const double heading = j.contains("heading") ? j["heading"].get<double>() : 0.0;
    return Pose{j["x"].get<double>(), j["y"].get<double>(), heading};
}

}  // namespace

std::string_view to_string(MessageType type) {
    for (const auto& [t, name] : kTypes) {
        if (t == type) {
            return name;
        }
    }
    return "unknown";
}

std::string_view to_string(BtOutcome outcome) {
    switch (outcome) {
        case BtOutcome::Success:
            return "SUCCESS";
        case BtOutcome::Failure:
            return "FAILURE";
        case BtOutcome::Canceled:
            return "CANCELED";
    }
    return "FAILURE";
}

Message Message::load_goal(std::string id, std::vector<std::string> files) {
    Message m;
    m.type = MessageType::LoadGoal;
    m.id = std::move(id);
    m.files = std::move(files);
    return m;
}

Message Message::execute_goal(std::string id, std::string behavior_name, PoseList goals) {
    Message m;
    m.type = MessageType::ExecuteGoal;
    m.id = std::move(id);
    m.behavior_name = std::move(behavior_name);
    m.goals = std::move(goals);
    return m;
}

Message Message::cancel(std::string id) {
    Message m;
    m.type = MessageType::ExecuteCancel;
    m.id = std::move(id);
    return m;
}

Message Message::result(std::string id, BtOutcome outcome, std::string error) {
    Message m;
    m.type = MessageType::ExecuteResult;
    m.id = std::move(id);
    m.outcome = outcome;
    m.error = std::move(error);
    return m;
}

Message Message::reject(std::string id, std::string reason) {
    Message m;
    m.type = MessageType::Reject;
    m.id = std::move(id);
    m.reason = std::move(reason);
    return m;
}

std::string encode(const Message& m) {
    json j{{"type", to_string(m.type)}, {"id", m.id}};
    switch (m.type) {
        case MessageType::LoadGoal:
            j["files"] = m.files;
            break;
        case MessageType::LoadResult: {
            j["loaded"] = m.loaded;
            auto errs = json::array();
            for (const auto& e : m.errors) {
                errs.push_back({{"file", e.file}, {"message", e.message}});
            }
            j["errors"] = errs;
            break;
        }
        case MessageType::ExecuteGoal: {
            j["behavior_name"] = m.behavior_name;
            auto goals = json::array();
            for (const auto& p : m.goals) {
                goals.push_back(pose_json(p));
            }
            j["goals"] = goals;
            break;
        }
        case MessageType::ExecuteFeedback:
            j["active_nodes"] = m.active_nodes;
            j["robot_pose"] = m.robot_pose ? pose_json(*m.robot_pose) : json(nullptr);
            j["elapsed_ms"] = m.elapsed_ms;
            j["feedback_dropped"] = m.feedback_dropped;
            break;
        case MessageType::ExecuteCancel:
            break;
        case MessageType::ExecuteResult:
            j["outcome"] = to_string(m.outcome);
            if (!m.error.empty()) {
                j["error"] = m.error;
            }
            break;
        case MessageType::Reject:
            j["reason"] = m.reason;
            break;
    }
    return j.dump();
}

Message decode(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ProtocolError("message must be a JSON object");
    }
    try {
        Message m;
        const auto type = j.at("type").get<std::string>();
        bool known = false;
        for (const auto& [t, name] : kTypes) {
            if (name == type) {
                m.type = t;
                known = true;
            }
        }
        if (!known) {
            throw ProtocolError("unknown message type '" + type + "'");
        }
        m.id = j.at("id").get<std::string>();
        switch (m.type) {
            case MessageType::LoadGoal:
                m.files = j.at("files").get<std::vector<std::string>>();
                break;
            case MessageType::LoadResult:
                m.loaded = j.at("loaded").get<std::vector<std::string>>();
                for (const auto& e : j.at("errors")) {
                    m.errors.push_back({e.at("file").get<std::string>(), e.at("message").get<std::string>()});
                }
                break;
            case MessageType::ExecuteGoal:
                m.behavior_name = j.at("behavior_name").get<std::string>();
                if (j.contains("goals")) {
                    for (const auto& p : j["goals"]) {
                        m.goals.push_back(pose_from(p));
                    }
                }
                break;
            case MessageType::ExecuteFeedback:
                m.active_nodes = j.at("active_nodes").get<std::vector<std::string>>();
                if (j.contains("robot_pose") && !j["robot_pose"].is_null()) {
                    m.robot_pose = pose_from(j["robot_pose"]);
                }
                m.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
                m.feedback_dropped = j.value("feedback_dropped", std::uint64_t{0});
                break;
            case MessageType::ExecuteCancel:
                break;
            case MessageType::ExecuteResult: {
                const auto outcome = j.at("outcome").get<std::string>();
                if (outcome == "SUCCESS") {
                    m.outcome = BtOutcome::Success;
                } else if (outcome == "FAILURE") {
                    m.outcome = BtOutcome::Failure;
                } else if (outcome == "CANCELED") {
                    m.outcome = BtOutcome::Canceled;
                } else {
                    throw ProtocolError("unknown outcome '" + outcome + "'");
                }
                m.error = j.value("error", "");
                break;
            }
            case MessageType::Reject:
                m.reason = j.value("reason", "");
                break;
        }
        return m;
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("bad message: ") + e.what());
    }
}

}  // namespace hfsmbt::server
