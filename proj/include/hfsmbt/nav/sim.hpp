#pragma once

/// @file sim.hpp
/// @brief Simulator instance that owns the world and provides the navigation leaves.
///
/// Leaves registered by register_leaves():
///   ComputePathToPose  in goal (pose), out path
///   FollowPath         in path, optional patience (blocked ticks tolerated)
///   ClearObstacles, Wait (optional ticks), BackUp
///   IsPathClear        in path
///   IsGoalReached      in goal
/// The world clock advances once per before_tick() call, i.e. once per tree
/// tick across every execution; schedule entries refer to that clock.

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <string>
#include <vector>

#include "hfsmbt/bt/blackboard.hpp"
#include "hfsmbt/bt/registry.hpp"
#include "hfsmbt/nav/planner.hpp"
#include "hfsmbt/nav/world.hpp"

namespace hfsmbt::nav {

struct NavSimConfig {
    int follow_patience = 5;
    int wait_ticks = 3;
};

class NavSim {
public:
    explicit NavSim(GridWorld world, std::vector<ObstacleChange> schedule = {}, NavSimConfig config = {});

    void register_leaves(bt::LeafRegistry& registry);

    /// Advances the world clock, applies due schedule entries and publishes
    /// "robot_pose".
    void before_tick(bt::Blackboard& blackboard);
    /// Publishes "robot_pose" and appends the per-tick trace line.
    void after_tick(bt::Blackboard& blackboard);

    [[nodiscard]] std::uint64_t clock() const { return clock_.load(); }
    /// Number of ComputePathToPose invocations so far.
    [[nodiscard]] std::uint64_t plan_count() const { return plans_.load(); }
    [[nodiscard]] Pose robot_pose() const;
    [[nodiscard]] std::string world_text() const;
    [[nodiscard]] std::vector<std::string> trace() const;
    void write_trace(std::ostream& out) const;

    /// Direct access for tests and setup; not synchronized with running leaves.
    [[nodiscard]] GridWorld& world() { return world_; }

private:
    void note(const std::string& line);

    mutable std::mutex mutex_;
    GridWorld world_;
    std::vector<ObstacleChange> schedule_;
    NavSimConfig config_;
    std::atomic<std::uint64_t> clock_{0};
    std::atomic<std::uint64_t> plans_{0};
    std::vector<std::string> trace_;
};

}  // namespace hfsmbt::nav
