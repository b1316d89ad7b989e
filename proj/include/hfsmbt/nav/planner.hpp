#pragma once

/// @file planner.hpp
/// @brief Grid planning and the per-tick motion primitives used by the leaves.

#include <cstddef>

#include "hfsmbt/bt/status.hpp"
#include "hfsmbt/nav/world.hpp"

namespace hfsmbt::nav {

/// Shortest 4-connected route (A*, Manhattan heuristic). Ties are broken
/// first by lower f, then by insertion order with neighbors pushed N, E, S, W,
/// so equal inputs always give the same route. Dynamic obstacles count as
/// blocked. Throws NavError(GoalInObstacle, GoalUnreachable, OutOfBounds).
std::vector<Cell> plan_cells(const GridWorld& world, Cell start, Cell goal);

/// plan_cells between the cells nearest to @p start and @p goal, as poses
/// with headings along the direction of travel.
Path plan_path(const GridWorld& world, const Pose& start, const Pose& goal);

enum class FollowResult { Advanced, Blocked, Arrived };

const char* to_string(FollowResult r);

/// Moves the robot from path[cursor] to path[cursor + 1]. Blocked leaves the
/// robot in place. Arrived is returned when the robot ends on the last cell
/// (including when it already stands there).
FollowResult follow_path_step(GridWorld& world, const Path& path, std::size_t& cursor);

enum class RecoveryKind { Clear, Wait, BackUp };

/// Scratch state for multi-tick recoveries.
struct RecoveryState {
    int waited = 0;
};

/// clear: removes dynamic obstacles within one cell (8-neighborhood); Failure
/// when there was nothing to remove. wait: Running until @p wait_ticks calls
/// have been made, then Success. backup: one cell against the heading, Failure
/// when that cell is blocked.
bt::NodeStatus recovery_step(GridWorld& world, RecoveryKind kind, RecoveryState& state, int wait_ticks = 3);

}  // namespace hfsmbt::nav
