#pragma once

#include <span>
#include <string_view>

namespace hfsmbt::bt {

/// Result of ticking a node.
///
/// Idle is never returned by a tick: it is the resting status before the
/// first tick and after a halt.
enum class NodeStatus { Idle, Running, Success, Failure };

std::string_view to_string(NodeStatus s);

/// One-letter code used in the execution trace (S, F, R; I for Idle).
char status_letter(NodeStatus s);

constexpr bool is_terminal(NodeStatus s) {
    return s == NodeStatus::Success || s == NodeStatus::Failure;
}

/// Swaps Success and Failure, fixes Running and Idle.
constexpr NodeStatus invert(NodeStatus s) {
    switch (s) {
        case NodeStatus::Success:
            return NodeStatus::Failure;
        case NodeStatus::Failure:
            return NodeStatus::Success;
        default:
            return s;
    }
}

/// Pure status reductions for the three basic composites.
///
/// Sequence and Fallback scan children in priority order and stop at the
/// first child that does not let the scan continue; the result is what the
/// composite reports after ticking exactly that prefix.
NodeStatus reduce_sequence(std::span<const NodeStatus> statuses);
NodeStatus reduce_fallback(std::span<const NodeStatus> statuses);

/// Success iff count(Success) >= M; Failure iff count(Failure) > N - M;
/// otherwise Running. Throws BtError(InvalidThreshold) unless
/// 1 <= M <= N, and BtError(InvalidStatus) on an Idle entry.
NodeStatus reduce_parallel(int success_threshold, std::span<const NodeStatus> statuses);

}  // namespace hfsmbt::bt
