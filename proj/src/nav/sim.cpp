#include "hfsmbt/nav/sim.hpp"

#include <algorithm>
#include <any>
#include <cmath>
#include <ostream>

namespace hfsmbt::nav {

using bt::NodeStatus;

namespace {

struct FollowState {
    std::size_t cursor = 0;
    int blocked = 0;
};

int degrees(double radians) { return static_cast<int>(std::lround(radians * 180.0 / M_PI)); }

}  // namespace

NavSim::NavSim(GridWorld world, std::vector<ObstacleChange> schedule, NavSimConfig config)
    : world_(std::move(world)), schedule_(std::move(schedule)), config_(config) {
    std::stable_sort(schedule_.begin(), schedule_.end(),
                     [](const ObstacleChange& a, const ObstacleChange& b) { return a.at_tick < b.at_tick; });
}

void NavSim::note(const std::string& line) { trace_.push_back("tick=" + std::to_string(clock_.load()) + " " + line); }

void NavSim::before_tick(bt::Blackboard& blackboard) {
    std::lock_guard lock(mutex_);
    const auto now = ++clock_;
    for (const auto& change : schedule_) {
        if (change.at_tick != now) {
            continue;
        }
        const bool applied =
            change.add ? world_.add_dynamic_obstacle(change.cell) : world_.remove_dynamic_obstacle(change.cell);
        note(std::string("obstacle ") + (change.add ? "add " : "remove ") + to_string(change.cell) +
             (applied ? "" : " skipped"));
    }
    blackboard.set("robot_pose", world_.robot_pose());
}

void NavSim::after_tick(bt::Blackboard& blackboard) {
    std::lock_guard lock(mutex_);
    blackboard.set("robot_pose", world_.robot_pose());
    note("robot=" + to_string(world_.robot_cell()) + " heading=" + std::to_string(degrees(world_.robot_heading())));
}

Pose NavSim::robot_pose() const {
    std::lock_guard lock(mutex_);
    return world_.robot_pose();
}

std::string NavSim::world_text() const {
    std::lock_guard lock(mutex_);
    return world_.to_text();
}

std::vector<std::string> NavSim::trace() const {
    std::lock_guard lock(mutex_);
    return trace_;
}

void NavSim::write_trace(std::ostream& out) const {
    for (const auto& line : trace()) {
        out << line << '\n';
    }
}

void NavSim::register_leaves(bt::LeafRegistry& registry) {
    using bt::PortDirection;
    using bt::PortSpec;

    registry.register_action(
        "ComputePathToPose",
        [this](bt::LeafContext& ctx) {
            const Pose goal = ctx.input_as<Pose>("goal");
            std::lock_guard lock(mutex_);
            ++plans_;
            try {
                Path path = plan_path(world_, world_.robot_pose(), goal);
                note("plan " + to_string(world_.robot_cell()) + "->" + to_string(world_.cell_of(goal)) +
                     " cells=" + std::to_string(path.poses.size()));
                ctx.output("path", std::move(path));
                return NodeStatus::Success;
            } catch (const NavError& e) {
                note(std::string("plan failed ") + to_string(e.code()));
                return NodeStatus::Failure;
            }
        },
        {}, {PortSpec{"goal", PortDirection::Input, true}, PortSpec{"path", PortDirection::Output, true}});

    registry.register_action(
        "FollowPath",
        [this](bt::LeafContext& ctx) {
            const Path path = ctx.input_as<Path>("path");
            int patience = config_.follow_patience;
            if (ctx.binding("patience")) {
                patience = static_cast<int>(ctx.input_as<std::int64_t>("patience"));
            }
            std::lock_guard lock(mutex_);
            auto& slot = ctx.state();
            if (!slot.has_value()) {
                const Cell here = world_.robot_cell();
                const auto it = std::find_if(path.poses.begin(), path.poses.end(),
                                             [&](const Pose& p) { return world_.cell_of(p) == here; });
                if (it == path.poses.end()) {
                    note("follow off-path");
                    return NodeStatus::Failure;
                }
                slot = FollowState{static_cast<std::size_t>(it - path.poses.begin()), 0};
            }
            auto& st = std::any_cast<FollowState&>(slot);
            const FollowResult r = follow_path_step(world_, path, st.cursor);
            note(std::string("follow ") + to_string(r));
            switch (r) {
                case FollowResult::Arrived:
                    return NodeStatus::Success;
                case FollowResult::Advanced:
                    st.blocked = 0;
                    return NodeStatus::Running;
                case FollowResult::Blocked:
                    return ++st.blocked > patience ? NodeStatus::Failure : NodeStatus::Running;
            }
            return NodeStatus::Failure;
        },
        [this](bt::LeafContext&) {
            std::lock_guard lock(mutex_);
            note("follow halted");
        },
        {PortSpec{"path", PortDirection::Input, true}, PortSpec{"patience", PortDirection::Input, false}});

    registry.register_action("ClearObstacles", [this](bt::LeafContext&) {
        std::lock_guard lock(mutex_);
        RecoveryState unused;
        const auto s = recovery_step(world_, RecoveryKind::Clear, unused);
        note(std::string("recovery clear ") + std::string(1, bt::status_letter(s)));
        return s;
    });

    registry.register_action(
        "Wait",
        [this](bt::LeafContext& ctx) {
            int ticks = config_.wait_ticks;
            if (ctx.binding("ticks")) {
                ticks = static_cast<int>(ctx.input_as<std::int64_t>("ticks"));
            }
            std::lock_guard lock(mutex_);
            auto& slot = ctx.state();
            if (!slot.has_value()) {
                slot = RecoveryState{};
            }
            const auto s = recovery_step(world_, RecoveryKind::Wait, std::any_cast<RecoveryState&>(slot), ticks);
            note(std::string("recovery wait ") + std::string(1, bt::status_letter(s)));
            return s;
        },
        {}, {PortSpec{"ticks", PortDirection::Input, false}});

    registry.register_action("BackUp", [this](bt::LeafContext&) {
        std::lock_guard lock(mutex_);
        RecoveryState unused;
        const auto s = recovery_step(world_, RecoveryKind::BackUp, unused);
        note(std::string("recovery backup ") + std::string(1, bt::status_letter(s)));
        return s;
    });

    registry.register_condition(
        "IsPathClear",
        [this](bt::LeafContext& ctx) {
            const Path path = ctx.input_as<Path>("path");
            std::lock_guard lock(mutex_);
            const Cell here = world_.robot_cell();
            const bool clear = std::none_of(path.poses.begin(), path.poses.end(), [&](const Pose& p) {
                const Cell c = world_.cell_of(p);
                return !(c == here) && world_.is_blocked(c);
            });
            return clear ? NodeStatus::Success : NodeStatus::Failure;
        },
        {PortSpec{"path", PortDirection::Input, true}});

    registry.register_condition(
        "IsGoalReached",
        [this](bt::LeafContext& ctx) {
            const Pose goal = ctx.input_as<Pose>("goal");
            std::lock_guard lock(mutex_);
            return world_.robot_cell() == world_.cell_of(goal) ? NodeStatus::Success : NodeStatus::Failure;
        },
        {PortSpec{"goal", PortDirection::Input, true}});
}

}  // namespace hfsmbt::nav
