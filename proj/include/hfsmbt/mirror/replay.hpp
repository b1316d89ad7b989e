#pragma once

/// @file replay.hpp
/// @brief Rebuilds the active-state history from an event log alone.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfsmbt/hfsm/events.hpp"

namespace hfsmbt::hfsm {
class StateMachine;
}

namespace hfsmbt::mirror {

class SeqGap : public std::runtime_error {
public:
    SeqGap(std::uint64_t expected, std::uint64_t got);
    std::uint64_t expected;
    std::uint64_t got;
};

/// Active state paths (outermost first) right after event @c seq.
struct TimelineStep {
    std::uint64_t seq = 0;
    std::vector<std::string> active;
    bool operator==(const TimelineStep&) const = default;
};

using Timeline = std::vector<TimelineStep>;

/// One step per state_entered / state_exited / behavior_finished event.
/// The first event may have any seq; after that seq must increase by one.
Timeline replay(const std::vector<hfsm::MirrorEvent>& events);

/// As above, and additionally checks that every entered path names a state
/// of @p topology (without calling into any state). Throws
/// std::invalid_argument on an unknown path.
Timeline replay(const std::vector<hfsm::MirrorEvent>& events, hfsm::StateMachine& topology);

/// Entered state paths in order.
std::vector<std::string> visits(const Timeline& timeline);

/// Tracks the active path incrementally; used for mirror snapshots.
class ActiveTracker {
public:
    /// Returns true when the active set changed.
    bool apply(const hfsm::MirrorEvent& e);
    [[nodiscard]] const std::vector<std::string>& active() const { return active_; }

private:
    std::vector<std::string> active_;
};

}  // namespace hfsmbt::mirror
