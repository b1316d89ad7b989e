#include "hfsmbt/core/value.hpp"

#include <sstream>

namespace hfsmbt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void write_poses(std::ostringstream& out, const std::vector<Pose>& poses) {
    out << '[';
    for (std::size_t i = 0; i < poses.size(); ++i) {
        if (i != 0) {
            out << ", ";
        }
        out << to_string(poses[i]);
    }
    out << ']';
}

}  // namespace

const char* value_type_name(const Value& v) {
    return std::visit(overloaded{
                          [](bool) { return "bool"; },
                          [](std::int64_t) { return "int"; },
                          [](double) { return "real"; },
                          [](const std::string&) { return "string"; },
                          [](const Pose&) { return "pose"; },
                          [](const PoseList&) { return "pose_list"; },
                          [](const Path&) { return "path"; },
                      },
                      v);
}

std::string to_string(const Pose& p) {
    std::ostringstream out;
    out << '(' << p.x << ", " << p.y << ", " << p.heading << ')';
    return out.str();
}

std::string to_string(const Value& v) {
    std::ostringstream out;
    std::visit(overloaded{
                   [&](bool b) { out << (b ? "true" : "false"); },
                   [&](std::int64_t i) { out << i; },
                   [&](double d) { out << d; },
                   [&](const std::string& s) { out << s; },
                   [&](const Pose& p) { out << to_string(p); },
                   [&](const PoseList& l) { write_poses(out, l); },
                   [&](const Path& p) {
                       out << "path";
                       write_poses(out, p.poses);
                   },
               },
               v);
    return out.str();
}

}  // namespace hfsmbt
