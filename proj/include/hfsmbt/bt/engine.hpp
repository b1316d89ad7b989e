#pragma once

/// @file engine.hpp
/// @brief Tick propagation and halting.
///
/// Composite semantics:
///  - Sequence / Fallback keep a memory cursor and resume at the first
///    unfinished child on the next tick.
///  - ReactiveSequence / ReactiveFallback restart at child 0 every tick and
///    halt any later child that was Running but is no longer reached.
///  - Parallel(M) ticks every unfinished child; Success at >= M successes,
///    Failure at > N - M failures. Still-Running children are halted when it
///    finishes.
///  - Repeat(n) re-runs its child after each success and fails as soon as the
///    child fails; Retry(n) re-runs after each failure and succeeds as soon as
///    the child succeeds.
/// After any composite or decorator returns Success or Failure its children
/// are reset to Idle.

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hfsmbt/bt/blackboard.hpp"
#include "hfsmbt/bt/node.hpp"
#include "hfsmbt/bt/registry.hpp"

namespace hfsmbt::bt {

struct TraceEntry {
    std::uint64_t tick = 0;
    std::string node;
    NodeStatus status = NodeStatus::Idle;

    /// `tick=<n> node=<name> status=<S|F|R>`
    [[nodiscard]] std::string to_line() const;
};

/// One entry per leaf invocation, in invocation order.
class TraceLog {
public:
    void record(std::uint64_t tick, std::string node, NodeStatus status);
    [[nodiscard]] const std::vector<TraceEntry>& entries() const { return entries_; }
    [[nodiscard]] bool contains_node(const std::string& node) const;
    [[nodiscard]] std::size_t count(const std::string& node) const;
    void write(std::ostream& out) const;
    void clear() { entries_.clear(); }

private:
    std::vector<TraceEntry> entries_;
};

struct TickEnv {
    Blackboard& blackboard;
    const LeafRegistry& registry;
    const TickContext& ctx;
    TraceLog* trace = nullptr;
};

/// Ticks @p tree once and returns the root status (never Idle).
///
/// Throws BtError on UnregisteredLeaf, ConditionReturnedRunning,
/// BlackboardKeyMissing (a required input port bound to an absent key) or an
/// unresolved SubTree. After an exception the tree should be halted.
NodeStatus tick_root(BtNode& tree, const TickEnv& env);

/// Returns @p node and its descendants to Idle. Running leaves get their halt
/// hook exactly once; Idle and finished leaves do not.
void halt(BtNode& node, const TickEnv& env);

/// Owns the tick counter and start time for repeated ticking of one tree.
class TreeExecutor {
public:
    TreeExecutor(BtNode tree, Blackboard& blackboard, const LeafRegistry& registry,
                 TraceLog* trace = nullptr, const std::atomic<bool>* cancel_flag = nullptr);

    /// Advances the tick index by one and ticks the root.
    NodeStatus tick();
    void halt();

    [[nodiscard]] BtNode& tree() { return tree_; }
    [[nodiscard]] const BtNode& tree() const { return tree_; }
    [[nodiscard]] std::uint64_t tick_count() const { return ctx_.tick_index; }

    /// Ticks until the root returns Success or Failure, at most @p max_ticks
    /// times. Returns Running if the budget runs out.
    NodeStatus run_until_done(std::uint64_t max_ticks);

private:
    BtNode tree_;
    Blackboard& blackboard_;
    const LeafRegistry& registry_;
    TraceLog* trace_;
    TickContext ctx_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace hfsmbt::bt
