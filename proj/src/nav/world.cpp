#include "hfsmbt/nav/world.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace hfsmbt::nav {

std::string to_string(const Cell& c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

const char* to_string(NavErrc code) {
    switch (code) {
        case NavErrc::GoalUnreachable:
            return "GoalUnreachable";
        case NavErrc::GoalInObstacle:
            return "GoalInObstacle";
        case NavErrc::OutOfBounds:
            return "OutOfBounds";
        case NavErrc::BadWorld:
            return "BadWorld";
        case NavErrc::BadSchedule:
            return "BadSchedule";
    }
    return "Unknown";
}

NavError::NavError(NavErrc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

namespace {

std::string slurp(const std::string& path, NavErrc code) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw NavError(code, "cannot read " + path);
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

std::vector<ObstacleChange> parse_schedule(const std::string& json_text) {
    std::vector<ObstacleChange> out;
    try {
        const auto doc = nlohmann::json::parse(json_text);
        if (!doc.is_array()) {
            throw NavError(NavErrc::BadSchedule, "schedule must be a JSON array");
        }
        for (const auto& entry : doc) {
            ObstacleChange c;
            c.at_tick = entry.at("at_tick").get<std::uint64_t>();
            const auto op = entry.at("op").get<std::string>();
            if (op != "add" && op != "remove") {
                throw NavError(NavErrc::BadSchedule, "op must be add or remove, got " + op);
            }
            c.add = op == "add";
            const auto& cell = entry.at("cell");
            if (!cell.is_array() || cell.size() != 2) {
                throw NavError(NavErrc::BadSchedule, "cell must be [x, y]");
            }
            c.cell = {cell[0].get<int>(), cell[1].get<int>()};
            out.push_back(c);
        }
    } catch (const nlohmann::json::exception& e) {
        throw NavError(NavErrc::BadSchedule, e.what());
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ObstacleChange& a, const ObstacleChange& b) { return a.at_tick < b.at_tick; });
    return out;
}

std::vector<ObstacleChange> load_schedule(const std::string& path) {
    return parse_schedule(slurp(path, NavErrc::BadSchedule));
}

std::string schedule_to_json(const std::vector<ObstacleChange>& schedule) {
    auto arr = nlohmann::json::array();
    for (const auto& c : schedule) {
        arr.push_back({{"at_tick", c.at_tick}, {"op", c.add ? "add" : "remove"}, {"cell", {c.cell.x, c.cell.y}}});
    }
    return arr.dump(2) + "\n";
}

GridWorld::GridWorld(int width, int height, double cell_size)
    : width_(width), height_(height), cell_size_(cell_size) {
    if (width <= 0 || height <= 0 || !(cell_size > 0.0)) {
        throw NavError(NavErrc::BadWorld, "world dimensions must be positive");
    }
    static_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

GridWorld GridWorld::from_text(const std::string& text, double cell_size) {
    std::vector<std::string> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            rows.push_back(line);
        }
    }
    if (rows.empty()) {
        throw NavError(NavErrc::BadWorld, "empty map");
    }
    GridWorld w(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()), cell_size);
    bool have_start = false;
    for (int y = 0; y < w.height_; ++y) {
        const auto& row = rows[static_cast<std::size_t>(y)];
        if (static_cast<int>(row.size()) != w.width_) {
            throw NavError(NavErrc::BadWorld, "row " + std::to_string(y + 1) + " has length " +
                                                  std::to_string(row.size()) + ", expected " +
                                                  std::to_string(w.width_));
        }
        for (int x = 0; x < w.width_; ++x) {
            switch (row[static_cast<std::size_t>(x)]) {
                case '#':
                    w.set_static_obstacle({x, y}, true);
                    break;
                case '.':
                    break;
                case 'S':
                    if (have_start) {
                        throw NavError(NavErrc::BadWorld, "more than one S");
                    }
                    have_start = true;
                    w.start_ = w.robot_ = {x, y};
                    break;
                default:
                    throw NavError(NavErrc::BadWorld, "unexpected character '" +
                                                          std::string(1, row[static_cast<std::size_t>(x)]) +
                                                          "' at row " + std::to_string(y + 1));
            }
        }
    }
    if (!have_start) {
        throw NavError(NavErrc::BadWorld, "map has no S");
    }
    return w;
}

GridWorld GridWorld::load(const std::string& path, double cell_size) {
    return from_text(slurp(path, NavErrc::BadWorld), cell_size);
}

GridWorld GridWorld::random(std::uint64_t seed, int width, int height, double density) {
    GridWorld w(width, height);
    w.seed_ = seed;
    // Raw engine output only, so maps are identical across standard libraries.
    std::mt19937_64 rng(seed);
    const auto threshold = static_cast<std::uint64_t>(density * 1000.0);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            w.set_static_obstacle({x, y}, rng() % 1000 < threshold);
        }
    }
    auto free = w.free_cells();
    if (free.empty()) {
        w.set_static_obstacle({0, 0}, false);
        free = w.free_cells();
    }
    const Cell start = free[rng() % free.size()];
    w.start_ = w.robot_ = start;

    std::vector<char> seen(w.static_.size(), 0);
    std::deque<Cell> queue{start};
    seen[static_cast<std::size_t>(start.y * width + start.x)] = 1;
    while (!queue.empty()) {
        const Cell c = queue.front();
        queue.pop_front();
        for (const auto& d : kDirections) {
            const Cell n{c.x + d.x, c.y + d.y};
            if (w.in_bounds(n) && !w.is_static_obstacle(n) && seen[static_cast<std::size_t>(n.y * width + n.x)] == 0) {
                seen[static_cast<std::size_t>(n.y * width + n.x)] = 1;
                queue.push_back(n);
            }
        }
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (seen[i] == 0) {
            w.static_[i] = 1;
        }
    }
    return w;
}

std::string GridWorld::to_text() const {
    std::string out;
    out.reserve(static_cast<std::size_t>((width_ + 1) * height_));
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            if (Cell{x, y} == start_) {
                out += 'S';
            } else {
                out += is_static_obstacle({x, y}) ? '#' : '.';
            }
        }
        out += '\n';
    }
    return out;
}

bool GridWorld::in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }

bool GridWorld::is_static_obstacle(Cell c) const {
    return in_bounds(c) && static_[static_cast<std::size_t>(c.y * width_ + c.x)] != 0;
}

bool GridWorld::is_blocked(Cell c) const { return !in_bounds(c) || is_static_obstacle(c) || is_dynamic_obstacle(c); }

std::vector<Cell> GridWorld::free_cells() const {
    std::vector<Cell> out;
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            if (!is_static_obstacle({x, y})) {
                out.push_back({x, y});
            }
        }
    }
    return out;
}

void GridWorld::set_static_obstacle(Cell c, bool blocked) {
    if (!in_bounds(c)) {
        throw NavError(NavErrc::OutOfBounds, to_string(c));
    }
    static_[static_cast<std::size_t>(c.y * width_ + c.x)] = blocked ? 1 : 0;
}

bool GridWorld::add_dynamic_obstacle(Cell c) {
    if (!in_bounds(c) || c == robot_ || is_static_obstacle(c)) {
        return false;
    }
    return dynamic_.insert(c).second;
}

bool GridWorld::remove_dynamic_obstacle(Cell c) { return dynamic_.erase(c) > 0; }

Pose GridWorld::robot_pose() const {
    Pose p = pose_of(robot_);
    p.heading = heading_;
    return p;
}

void GridWorld::place_robot(Cell c, double heading) {
    if (!in_bounds(c)) {
        throw NavError(NavErrc::OutOfBounds, to_string(c));
    }
    if (is_static_obstacle(c) || is_dynamic_obstacle(c)) {
        throw NavError(NavErrc::GoalInObstacle, "robot cannot stand on " + to_string(c));
    }
    robot_ = c;
    heading_ = heading;
}

Pose GridWorld::pose_of(Cell c) const { return Pose{c.x * cell_size_, c.y * cell_size_, 0.0}; }

Cell GridWorld::cell_of(const Pose& p) const {
    return Cell{static_cast<int>(std::lround(p.x / cell_size_)), static_cast<int>(std::lround(p.y / cell_size_))};
}

}  // namespace hfsmbt::nav
