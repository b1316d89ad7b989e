#include "hfsmbt/flexbt/bridge.hpp"

#include <thread>

namespace hfsmbt::flexbt {

using server::BtOutcome;
using server::Message;
using server::MessageType;
using server::TransportError;
using Clock = std::chrono::steady_clock;

server::BtClient& Connection::get() {
    if (!client_) {
        client_.emplace(config_.host, config_.port, config_.feedback_timeout);
    }
    return *client_;
}

BtLoaderState::BtLoaderState(std::string name, BridgeConfig config)
    : State(std::move(name), {"done", "failed"}, {}, {"load_errors"}), config_(std::move(config)), conn_(config_) {}

void BtLoaderState::on_enter(hfsm::StateContext&) {
    failed_ = false;
    try {
        auto& client = conn_.get();
        id_ = client.next_id("load");
        client.send(Message::load_goal(id_, config_.files));
        deadline_ = Clock::now() + config_.feedback_timeout;
    } catch (const TransportError&) {
        conn_.reset();
        failed_ = true;
    }
}

std::optional<std::string> BtLoaderState::execute(hfsm::StateContext& ctx) {
    if (failed_) {
        ctx.userdata.set("load_errors", std::string("transport: server unreachable"));
        return "failed";
    }
    try {
        while (auto m = conn_.get().poll()) {
            if (m->id != id_ || m->type != MessageType::LoadResult) {
                continue;
            }
            if (m->errors.empty()) {
                return "done";
            }
            std::string lines;
            for (const auto& e : m->errors) {
                lines += e.file + ": " + e.message + "\n";
            }
            ctx.userdata.set("load_errors", lines);
            return "failed";
        }
    } catch (const TransportError& e) {
        conn_.reset();
        ctx.userdata.set("load_errors", std::string("transport: ") + e.what());
        return "failed";
    }
    if (Clock::now() > deadline_) {
        ctx.userdata.set("load_errors", std::string("transport: no load result"));
        return "failed";
    }
    return std::nullopt;
}

void BtLoaderState::on_exit(hfsm::StateContext&) {}

BtExecuteState::BtExecuteState(std::string name, BridgeConfig config)
    : BtExecuteState(std::move(name), std::move(config), {}) {}

BtExecuteState::BtExecuteState(std::string name, BridgeConfig config, std::vector<std::string> inputs)
    : State(std::move(name), {"done", "failed", "canceled"}, std::move(inputs)),
      config_(std::move(config)),
      conn_(config_) {}

void BtExecuteState::on_enter(hfsm::StateContext& ctx) {
    in_flight_ = false;
    early_.reset();
    const auto poses = goals(ctx);
    if (!poses) {
        early_ = "failed";
        return;
    }
    try {
        auto& client = conn_.get();
        id_ = client.next_id("exec");
        client.send(Message::execute_goal(id_, config_.behavior_name, *poses));
        in_flight_ = true;
        last_heard_ = Clock::now();
    } catch (const TransportError&) {
        conn_.reset();
        early_ = "failed";
    }
}

std::optional<std::string> BtExecuteState::handle(const Message& m, hfsm::StateContext& ctx) {
    if (m.id != id_) {
        return std::nullopt;
    }
    last_heard_ = Clock::now();
    switch (m.type) {
        case MessageType::ExecuteFeedback: {
            hfsm::MirrorEvent e;
            e.kind = hfsm::EventKind::BtFeedback;
            e.state = ctx.path;
            e.active_nodes = m.active_nodes;
            e.robot_pose = m.robot_pose;
            e.elapsed_ms = m.elapsed_ms;
            ctx.supervisor.emit(std::move(e));
            return std::nullopt;
        }
        case MessageType::ExecuteResult:
            in_flight_ = false;
            switch (m.outcome) {
                case BtOutcome::Success:
                    return "done";
                case BtOutcome::Failure:
                    return "failed";
                case BtOutcome::Canceled:
                    return "canceled";
            }
            return "failed";
        case MessageType::Reject:
            in_flight_ = false;
            return "failed";
        default:
            return std::nullopt;
    }
}

std::optional<std::string> BtExecuteState::execute(hfsm::StateContext& ctx) {
    if (early_) {
        return early_;
    }
    if (!in_flight_) {
        return "failed";
    }
    try {
        while (auto m = conn_.get().poll()) {
            if (auto outcome = handle(*m, ctx)) {
                return outcome;
            }
        }
    } catch (const TransportError&) {
        conn_.reset();
        in_flight_ = false;
        return "failed";
    }
    if (Clock::now() - last_heard_ > config_.feedback_timeout) {
        abandon(ctx);
        return "failed";
    }
    return std::nullopt;
}

void BtExecuteState::abandon(hfsm::StateContext& ctx) {
    if (!in_flight_) {
        return;
    }
    in_flight_ = false;
    try {
        auto& client = conn_.get();
        client.send(Message::cancel(id_));
        ++cancels_;
        const auto deadline = Clock::now() + config_.feedback_timeout;
        while (Clock::now() < deadline) {
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
            auto m = client.wait(std::max(left, std::chrono::milliseconds(1)));
            if (!m) {
                break;
            }
            if (m->id == id_ && (m->type == MessageType::ExecuteResult || m->type == MessageType::Reject)) {
                return;
            }
            if (m->type == MessageType::ExecuteFeedback) {
                (void)handle(*m, ctx);
            }
        }
    } catch (const TransportError&) {
    }
    // No confirmation: drop the connection so the server cancels on disconnect.
    conn_.reset();
}

void BtExecuteState::on_exit(hfsm::StateContext& ctx) { abandon(ctx); }

void BtExecuteState::on_preempt(hfsm::StateContext& ctx) { abandon(ctx); }

BtExecuteGoalState::BtExecuteGoalState(std::string name, BridgeConfig config)
    : BtExecuteState(std::move(name), config, {config.goal_key}) {}

std::optional<PoseList> BtExecuteGoalState::goals(hfsm::StateContext& ctx) {
    const auto v = ctx.userdata.find(config().goal_key);
    if (!v) {
        return std::nullopt;
    }
    if (const auto* p = std::get_if<Pose>(&*v)) {
        return PoseList{*p};
    }
    if (const auto* list = std::get_if<PoseList>(&*v); list && !list->empty()) {
        return *list;
    }
    return std::nullopt;
}

}  // namespace hfsmbt::flexbt
