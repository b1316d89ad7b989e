#pragma once

// Plain breadth-first search used as the reference for planner optimality.

#include <cstdlib>
#include <deque>
#include <optional>
#include <random>
#include <vector>

#include "hfsmbt/nav/planner.hpp"
#include "hfsmbt/nav/world.hpp"

namespace hfsmbt::nav::testing {

/// Number of steps on a shortest 4-connected route, or nullopt.
inline std::optional<int> bfs_distance(const GridWorld& world, Cell start, Cell goal) {
    if (world.is_blocked(goal)) {
        return std::nullopt;
    }
    std::vector<int> dist(static_cast<std::size_t>(world.width() * world.height()), -1);
    auto at = [&](Cell c) -> int& { return dist[static_cast<std::size_t>(c.y * world.width() + c.x)]; };
    std::deque<Cell> queue{start};
    at(start) = 0;
    while (!queue.empty()) {
        const Cell c = queue.front();
        queue.pop_front();
        if (c == goal) {
            return at(c);
        }
        for (const auto& d : kDirections) {
            const Cell n{c.x + d.x, c.y + d.y};
            if (!world.is_blocked(n) && at(n) < 0) {
                at(n) = at(c) + 1;
                queue.push_back(n);
            }
        }
    }
    return std::nullopt;
}

struct OptimalityReport {
    int worlds = 0;
    int queries = 0;
    int mismatches = 0;
    int invalid_paths = 0;
};

inline bool valid_route(const GridWorld& world, const std::vector<Cell>& route, Cell start, Cell goal) {
    if (route.empty() || !(route.front() == start) || !(route.back() == goal)) {
        return false;
    }
    for (std::size_t i = 0; i < route.size(); ++i) {
        if (world.is_blocked(route[i])) {
            return false;
        }
        if (i > 0 && std::abs(route[i].x - route[i - 1].x) + std::abs(route[i].y - route[i - 1].y) != 1) {
            return false;
        }
    }
    return true;
}

/// Random worlds of 2..20 cells per side; per world one random query plus
/// first-free-cell to last-free-cell.
inline OptimalityReport check_planner_optimality(std::uint64_t seed, int worlds) {
    OptimalityReport report;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < worlds; ++i) {
        const int w = 2 + static_cast<int>(rng() % 19);
        const int h = 2 + static_cast<int>(rng() % 19);
        const double density = static_cast<double>(rng() % 35) / 100.0;
        // Unfilled random map so that unreachable goals are exercised too.
        GridWorld world(w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                world.set_static_obstacle({x, y}, static_cast<double>(rng() % 1000) < density * 1000.0);
            }
        }
        const auto free = world.free_cells();
        if (free.size() < 2) {
            continue;
        }
        ++report.worlds;
        std::vector<std::pair<Cell, Cell>> queries{{free[rng() % free.size()], free[rng() % free.size()]},
                                                    {free.front(), free.back()}};
        for (const auto& [s, g] : queries) {
            ++report.queries;
            const auto oracle = bfs_distance(world, s, g);
            try {
                const auto route = plan_cells(world, s, g);
                if (!valid_route(world, route, s, g)) {
                    ++report.invalid_paths;
                }
                if (!oracle || static_cast<int>(route.size()) - 1 != *oracle) {
                    ++report.mismatches;
                }
            } catch (const NavError& e) {
                if (oracle || e.code() != NavErrc::GoalUnreachable) {
                    ++report.mismatches;
                }
            }
        }
    }
    return report;
}

}  // namespace hfsmbt::nav::testing
