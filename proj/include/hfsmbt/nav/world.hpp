#pragma once

/// @file world.hpp
/// @brief 4-connected grid world with static and dynamic obstacles.
///
/// Cell (x, y) has its center at pose (x * cell_size, y * cell_size); row 0 is
/// the first line of the text map, so "north" is decreasing y.

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfsmbt/core/value.hpp"

namespace hfsmbt::nav {

struct Cell {
    int x = 0;
    int y = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

std::string to_string(const Cell& c);

/// Neighbor offsets in tie-break order: N, E, S, W.
inline constexpr Cell kDirections[4] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};

enum class NavErrc { GoalUnreachable, GoalInObstacle, OutOfBounds, BadWorld, BadSchedule };

const char* to_string(NavErrc code);

class NavError : public std::runtime_error {
public:
    NavError(NavErrc code, const std::string& detail);
    [[nodiscard]] NavErrc code() const noexcept { return code_; }

private:
    NavErrc code_;
};

/// One entry of the dynamic-obstacle schedule.
struct ObstacleChange {
    std::uint64_t at_tick = 0;
    bool add = true;
    Cell cell;

    friend bool operator==(const ObstacleChange&, const ObstacleChange&) = default;
};

/// Parses `[{"at_tick": 12, "op": "add", "cell": [3, 4]}, ...]`.
std::vector<ObstacleChange> parse_schedule(const std::string& json_text);
std::vector<ObstacleChange> load_schedule(const std::string& path);
std::string schedule_to_json(const std::vector<ObstacleChange>& schedule);

class GridWorld {
public:
    GridWorld(int width, int height, double cell_size = 1.0);

    /// `#` obstacle, `.` free, `S` start (exactly one). All rows equal width.
    static GridWorld from_text(const std::string& text, double cell_size = 1.0);
    static GridWorld load(const std::string& path, double cell_size = 1.0);

    /// Random map: obstacles with the given density, then every free cell not
    /// reachable from the start is filled so that all free cells connect.
    static GridWorld random(std::uint64_t seed, int width, int height, double density = 0.2);

    /// Static map with `S` at the start cell (dynamic obstacles not shown).
    [[nodiscard]] std::string to_text() const;

    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] double cell_size() const { return cell_size_; }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }

    [[nodiscard]] bool in_bounds(Cell c) const;
    [[nodiscard]] bool is_static_obstacle(Cell c) const;
    [[nodiscard]] bool is_dynamic_obstacle(Cell c) const { return dynamic_.contains(c); }
    /// Out of bounds counts as blocked.
    [[nodiscard]] bool is_blocked(Cell c) const;
    [[nodiscard]] std::vector<Cell> free_cells() const;

    void set_static_obstacle(Cell c, bool blocked);
    /// Refuses (returns false) for the robot cell, static cells and out of bounds.
    bool add_dynamic_obstacle(Cell c);
    bool remove_dynamic_obstacle(Cell c);
    [[nodiscard]] const std::set<Cell>& dynamic_obstacles() const { return dynamic_; }

    [[nodiscard]] Cell start_cell() const { return start_; }
    [[nodiscard]] Cell robot_cell() const { return robot_; }
    [[nodiscard]] double robot_heading() const { return heading_; }
    [[nodiscard]] Pose robot_pose() const;
    /// Throws NavError(OutOfBounds / GoalInObstacle) for an invalid cell.
    void place_robot(Cell c, double heading = 0.0);

    [[nodiscard]] Pose pose_of(Cell c) const;
    /// Nearest cell to a pose (may be out of bounds).
    [[nodiscard]] Cell cell_of(const Pose& p) const;

private:
    int width_;
    int height_;
    double cell_size_;
    std::uint64_t seed_ = 0;
    std::vector<char> static_;
    std::set<Cell> dynamic_;
    Cell start_;
    Cell robot_;
    double heading_ = 0.0;
};

}  // namespace hfsmbt::nav
