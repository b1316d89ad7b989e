#pragma once

/// @file value.hpp
/// @brief Value domain shared by the behavior-tree blackboard and HFSM userdata.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace hfsmbt {

/// Planar robot pose: position in meters, heading in radians.
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;

    friend bool operator==(const Pose&, const Pose&) = default;
};

using PoseList = std::vector<Pose>;

/// Ordered sequence of poses from start to goal.
///
/// Kept distinct from PoseList so that "a set of goals" and "a route" never
/// convert into each other silently.
struct Path {
    std::vector<Pose> poses;

    friend bool operator==(const Path&, const Path&) = default;
};

using Value = std::variant<bool, std::int64_t, double, std::string, Pose, PoseList, Path>;

/// Name of the alternative held by @p v ("bool", "int", "real", "string",
/// "pose", "pose_list", "path").
const char* value_type_name(const Value& v);

/// Human-readable rendering used in traces and diagnostics.
std::string to_string(const Pose& p);
std::string to_string(const Value& v);

}  // namespace hfsmbt
