#include "hfsmbt/nav/planner.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <tuple>

namespace hfsmbt::nav {

namespace {

int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

double heading_between(Cell from, Cell to) {
    return std::atan2(static_cast<double>(to.y - from.y), static_cast<double>(to.x - from.x));
}

}  // namespace

std::vector<Cell> plan_cells(const GridWorld& world, Cell start, Cell goal) {
    if (!world.in_bounds(start) || !world.in_bounds(goal)) {
        throw NavError(NavErrc::OutOfBounds, to_string(start) + " -> " + to_string(goal));
    }
    if (world.is_blocked(goal)) {
        throw NavError(NavErrc::GoalInObstacle, to_string(goal));
    }
    if (start == goal) {
        return {start};
    }
    const int w = world.width();
    const auto index = [w](Cell c) { return static_cast<std::size_t>(c.y * w + c.x); };
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(world.height());
    std::vector<int> g(n, std::numeric_limits<int>::max());
    std::vector<Cell> parent(n, Cell{-1, -1});
    std::vector<char> closed(n, 0);

    // (f, insertion sequence, cell); the sequence makes ordering total.
    using Entry = std::tuple<int, std::uint64_t, int, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    std::uint64_t seq = 0;
    g[index(start)] = 0;
    open.emplace(manhattan(start, goal), seq++, start.x, start.y);

    while (!open.empty()) {
        const auto [f, s, x, y] = open.top();
        open.pop();
        const Cell c{x, y};
        if (closed[index(c)] != 0) {
            continue;
        }
        closed[index(c)] = 1;
        if (c == goal) {
            std::vector<Cell> route{goal};
            while (!(route.back() == start)) {
                route.push_back(parent[index(route.back())]);
            }
            return {route.rbegin(), route.rend()};
        }
        for (const auto& d : kDirections) {
            const Cell nb{c.x + d.x, c.y + d.y};
            if (world.is_blocked(nb) || closed[index(nb)] != 0) {
                continue;
            }
            const int cand = g[index(c)] + 1;
            if (cand < g[index(nb)]) {
                g[index(nb)] = cand;
                parent[index(nb)] = c;
                open.emplace(cand + manhattan(nb, goal), seq++, nb.x, nb.y);
            }
        }
    }
    throw NavError(NavErrc::GoalUnreachable, to_string(start) + " -> " + to_string(goal));
}

Path plan_path(const GridWorld& world, const Pose& start, const Pose& goal) {
    const auto cells = plan_cells(world, world.cell_of(start), world.cell_of(goal));
    Path path;
    path.poses.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        Pose p = world.pose_of(cells[i]);
        if (i + 1 < cells.size()) {
            p.heading = heading_between(cells[i], cells[i + 1]);
        } else if (i > 0) {
            p.heading = heading_between(cells[i - 1], cells[i]);
        } else {
            p.heading = start.heading;
        }
        path.poses.push_back(p);
    }
    return path;
}

const char* to_string(FollowResult r) {
    switch (r) {
        case FollowResult::Advanced:
            return "advanced";
        case FollowResult::Blocked:
            return "blocked";
        case FollowResult::Arrived:
            return "arrived";
    }
    return "?";
}

FollowResult follow_path_step(GridWorld& world, const Path& path, std::size_t& cursor) {
    if (path.poses.empty() || cursor + 1 >= path.poses.size()) {
        return FollowResult::Arrived;
    }
    const Cell here = world.robot_cell();
    const Cell next = world.cell_of(path.poses[cursor + 1]);
    if (world.is_blocked(next)) {
        return FollowResult::Blocked;
    }
    world.place_robot(next, heading_between(here, next));
    ++cursor;
    return cursor + 1 >= path.poses.size() ? FollowResult::Arrived : FollowResult::Advanced;
}

bt::NodeStatus recovery_step(GridWorld& world, RecoveryKind kind, RecoveryState& state, int wait_ticks) {
    switch (kind) {
        case RecoveryKind::Clear: {
            const Cell r = world.robot_cell();
            int removed = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    removed += world.remove_dynamic_obstacle({r.x + dx, r.y + dy}) ? 1 : 0;
                }
            }
            return removed > 0 ? bt::NodeStatus::Success : bt::NodeStatus::Failure;
        }
        case RecoveryKind::Wait:
            ++state.waited;
            return state.waited >= wait_ticks ? bt::NodeStatus::Success : bt::NodeStatus::Running;
        case RecoveryKind::BackUp: {
            const double h = world.robot_heading();
            const Cell r = world.robot_cell();
            const Cell back{r.x - static_cast<int>(std::lround(std::cos(h))),
                            r.y - static_cast<int>(std::lround(std::sin(h)))};
            if (back == r || world.is_blocked(back)) {
                return bt::NodeStatus::Failure;
            }
            world.place_robot(back, h);
            return bt::NodeStatus::Success;
        }
    }
    return bt::NodeStatus::Failure;
}

}  // namespace hfsmbt::nav
