#include "hfsmbt/hfsm/executive.hpp"

#include <thread>

#include "hfsmbt/hfsm/error.hpp"

namespace hfsmbt::hfsm {

bool is_finished_outcome(const std::string& outcome) {
    return outcome == "finished" || outcome == "done" || outcome == "succeeded";
}

Executive::Executive(StateMachine& root, CommandQueue& commands, ExecutiveConfig config)
    : root_(root), commands_(commands), config_(config), autonomy_(config.autonomy) {}

void Executive::add_sink(EventSink sink) { sinks_.push_back(std::move(sink)); }

void Executive::emit(MirrorEvent event) {
    event.seq = next_seq_++;
    event.timestamp_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
    if (event.kind == EventKind::StateEntered || event.kind == EventKind::StateExited) {
        refresh_active();
    }
    for (const auto& sink : sinks_) {
        sink(event);
    }
}

void Executive::refresh_active() {
    std::vector<std::string> paths;
    root_.active_paths(paths);
    std::lock_guard lock(active_mutex_);
    active_ = std::move(paths);
}

std::vector<std::string> Executive::active_path() const {
    std::lock_guard lock(active_mutex_);
    return active_;
}

bool Executive::process(const OperatorCommand& cmd) {
    MirrorEvent ack;
    ack.kind = EventKind::CommandAck;
    ack.command = to_json(cmd);
    bool preempt = false;
    try {
        switch (cmd.type) {
            case CommandType::SetAutonomy: {
                autonomy_ = cmd.level;
                MirrorEvent ev;
                ev.kind = EventKind::AutonomyChanged;
                ev.level = cmd.level;
                emit(std::move(ev));
                break;
            }
            case CommandType::ConfirmTransition:
                root_.confirm(cmd.state, cmd.outcome);
                break;
            case CommandType::ForceTransition:
                root_.force(cmd.state, cmd.outcome);
                break;
            case CommandType::Preempt:
                preempt = true;
                break;
            case CommandType::ProvideGoal:
                goals_.pending.push_back(cmd.poses);
                break;
            case CommandType::EndGoals:
                goals_.ended = true;
                break;
        }
    } catch (const HfsmError& e) {
        ack.error = e.what();
    }
    emit(std::move(ack));
    return preempt;
}

std::string Executive::execute(UserData initial) {
    root_.validate();
    userdata_ = std::move(initial);
    start_ = std::chrono::steady_clock::now();
    const std::string root_path = "/" + root_.name();
    UserDataView view(userdata_, root_path, root_.input_keys(), root_.output_keys(), nullptr, nullptr);
    StateContext ctx{view, root_path, *this};

    MirrorEvent started;
    started.kind = EventKind::BehaviorStarted;
    started.name = root_.name();
    emit(std::move(started));

    auto finish = [&](const std::string& outcome) {
        MirrorEvent ev;
        ev.kind = EventKind::BehaviorFinished;
        ev.outcome = outcome;
        emit(std::move(ev));
        return outcome;
    };

    root_.on_enter(ctx);
    auto next = start_;
    while (true) {
        bool preempt = false;
        for (const auto& cmd : commands_.drain()) {
            preempt = process(cmd) || preempt;
        }
        if (preempt) {
            root_.on_preempt(ctx);
            return finish(kPreempted);
        }
        if (auto outcome = root_.execute(ctx)) {
            refresh_active();
            return finish(*outcome);
        }
        next += config_.period;
        const auto now = std::chrono::steady_clock::now();
        if (next < now) {
            next = now;
        }
        std::this_thread::sleep_until(next);
    }
}

}  // namespace hfsmbt::hfsm
