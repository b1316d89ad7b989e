#include "hfsmbt/hfsm/builtin.hpp"

namespace hfsmbt::hfsm {

GetGoalState::GetGoalState(std::string name, std::string output_key)
    : State(std::move(name), {"received", "finished"}, {}, {output_key}), key_(std::move(output_key)) {}

std::optional<std::string> GetGoalState::execute(StateContext& ctx) {
    auto& box = ctx.supervisor.goals();
    if (!box.pending.empty()) {
        PoseList poses = std::move(box.pending.front());
        box.pending.pop_front();
        if (poses.size() == 1) {
            ctx.userdata.set(key_, poses.front());
        } else {
            ctx.userdata.set(key_, std::move(poses));
        }
        return "received";
    }
    if (box.ended) {
        return "finished";
    }
    return std::nullopt;
}

WaitState::WaitState(std::string name, std::chrono::milliseconds duration)
    : State(std::move(name), {"done"}), duration_(duration) {}

void WaitState::on_enter(StateContext&) { until_ = std::chrono::steady_clock::now() + duration_; }

std::optional<std::string> WaitState::execute(StateContext&) {
    if (std::chrono::steady_clock::now() >= until_) {
        return "done";
    }
    return std::nullopt;
}

}  // namespace hfsmbt::hfsm
