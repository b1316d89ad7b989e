#include "hfsmbt/bt/status.hpp"

#include <algorithm>

#include "hfsmbt/bt/error.hpp"

namespace hfsmbt::bt {

std::string_view to_string(NodeStatus s) {
    switch (s) {
        case NodeStatus::Idle:
            return "Idle";
        case NodeStatus::Running:
            return "Running";
        case NodeStatus::Success:
            return "Success";
        case NodeStatus::Failure:
            return "Failure";
    }
    return "?";
}

char status_letter(NodeStatus s) {
    switch (s) {
        case NodeStatus::Running:
            return 'R';
        case NodeStatus::Success:
            return 'S';
        case NodeStatus::Failure:
            return 'F';
        case NodeStatus::Idle:
            break;
    }
    return 'I';
}

NodeStatus reduce_sequence(std::span<const NodeStatus> statuses) {
    for (NodeStatus s : statuses) {
        if (s == NodeStatus::Idle) {
            throw BtError(BtErrc::InvalidStatus, "Sequence", "Idle child status");
        }
        if (s != NodeStatus::Success) {
            return s;
        }
    }
    return NodeStatus::Success;
}

NodeStatus reduce_fallback(std::span<const NodeStatus> statuses) {
    for (NodeStatus s : statuses) {
        if (s == NodeStatus::Idle) {
            throw BtError(BtErrc::InvalidStatus, "Fallback", "Idle child status");
        }
        if (s != NodeStatus::Failure) {
            return s;
        }
    }
    return NodeStatus::Failure;
}

NodeStatus reduce_parallel(int success_threshold, std::span<const NodeStatus> statuses) {
    const auto n = static_cast<int>(statuses.size());
    if (success_threshold < 1 || success_threshold > n) {
        throw BtError(BtErrc::InvalidThreshold, "Parallel",
                      "threshold " + std::to_string(success_threshold) + " with " + std::to_string(n) +
                          " children");
    }
    if (std::find(statuses.begin(), statuses.end(), NodeStatus::Idle) != statuses.end()) {
        throw BtError(BtErrc::InvalidStatus, "Parallel", "Idle child status");
    }
    const auto successes = std::count(statuses.begin(), statuses.end(), NodeStatus::Success);
    const auto failures = std::count(statuses.begin(), statuses.end(), NodeStatus::Failure);
    if (successes >= success_threshold) {
        return NodeStatus::Success;
    }
    if (failures > n - success_threshold) {
        return NodeStatus::Failure;
    }
    return NodeStatus::Running;
}

}  // namespace hfsmbt::bt
