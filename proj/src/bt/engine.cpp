#include "hfsmbt/bt/engine.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "hfsmbt/bt/error.hpp"

namespace hfsmbt::bt {

namespace {

NodeStatus tick_node(BtNode& node, const TickEnv& env, const KeyScope* scope);
void halt_node(BtNode& node, const TickEnv& env, const KeyScope* scope);

KeyScope child_scope(const BtNode& subtree, const KeyScope* parent) { return KeyScope{&subtree.ports(), parent}; }

void halt_children(BtNode& node, const TickEnv& env, const KeyScope* scope, std::size_t from = 0) {
    auto& children = node.children();
    for (std::size_t i = from; i < children.size(); ++i) {
        halt_node(children[i], env, scope);
    }
}

NodeStatus finish(BtNode& node, NodeStatus result, const TickEnv& env, const KeyScope* scope) {
    halt_children(node, env, scope);
    auto& rt = node.runtime();
    rt.cursor = 0;
    rt.counter = 0;
    rt.status = result;
    return result;
}

void check_required_inputs(const BtNode& node, const LeafImpl& impl, LeafContext& lc) {
    for (const auto& spec : impl.ports) {
        if (spec.direction != PortDirection::Input || !spec.required) {
            continue;
        }
        auto pv = lc.binding(spec.name);
        if (!pv) {
            throw BtError(BtErrc::BlackboardKeyMissing, spec.name, "input port not bound on " + node.name());
        }
        if (pv->is_key && !lc.blackboard().contains(pv->text)) {
            throw BtError(BtErrc::BlackboardKeyMissing, pv->text, "input port '" + spec.name + "' of " + node.name());
        }
    }
}

NodeStatus tick_leaf(BtNode& node, const TickEnv& env, const KeyScope* scope) {
    const LeafImpl* impl = env.registry.find(node.id());
    if (impl == nullptr || !impl->tick) {
        throw BtError(BtErrc::UnregisteredLeaf, node.id());
    }
    LeafContext lc(node, env.blackboard, env.ctx, scope);
    check_required_inputs(node, *impl, lc);

    const NodeStatus result = impl->tick(lc);
    if (result == NodeStatus::Idle) {
        throw BtError(BtErrc::LeafReturnedIdle, node.id());
    }
    if (node.kind() == NodeKind::Condition && result == NodeStatus::Running) {
        throw BtError(BtErrc::ConditionReturnedRunning, node.id());
    }
    if (env.trace != nullptr) {
        env.trace->record(env.ctx.tick_index, node.name(), result);
    }
    auto& rt = node.runtime();
    rt.status = result;
    if (is_terminal(result)) {
        rt.leaf_state.reset();
    }
    return result;
}

// Memory Sequence (continue_on = Success) and memory Fallback (continue_on =
// Failure) differ only in which child result lets the scan continue.
NodeStatus tick_memory(BtNode& node, const TickEnv& env, const KeyScope* scope, NodeStatus continue_on) {
    auto& rt = node.runtime();
    auto& children = node.children();
    while (rt.cursor < children.size()) {
        const NodeStatus s = tick_node(children[rt.cursor], env, scope);
        if (s == NodeStatus::Running) {
            rt.status = NodeStatus::Running;
            return NodeStatus::Running;
        }
        if (s != continue_on) {
            return finish(node, s, env, scope);
        }
        ++rt.cursor;
    }
    return finish(node, continue_on, env, scope);
}

NodeStatus tick_reactive(BtNode& node, const TickEnv& env, const KeyScope* scope, NodeStatus continue_on) {
    auto& children = node.children();
    for (std::size_t i = 0; i < children.size(); ++i) {
        const NodeStatus s = tick_node(children[i], env, scope);
        if (s == NodeStatus::Running) {
            halt_children(node, env, scope, i + 1);
            node.runtime().status = NodeStatus::Running;
            return NodeStatus::Running;
        }
        if (s != continue_on) {
            return finish(node, s, env, scope);
        }
    }
    return finish(node, continue_on, env, scope);
}

NodeStatus tick_parallel(BtNode& node, const TickEnv& env, const KeyScope* scope) {
    auto& children = node.children();
    std::vector<NodeStatus> statuses;
    statuses.reserve(children.size());
    for (auto& child : children) {
        if (!is_terminal(child.status())) {
            tick_node(child, env, scope);
        }
        statuses.push_back(child.status());
    }
    const NodeStatus result = reduce_parallel(node.success_threshold(), statuses);
    if (is_terminal(result)) {
        return finish(node, result, env, scope);
    }
    node.runtime().status = NodeStatus::Running;
    return NodeStatus::Running;
}

// Repeat (again_on = Success) reruns its child until the count of successes is
// reached; Retry (again_on = Failure) reruns until the count of failures is.
NodeStatus tick_loop(BtNode& node, const TickEnv& env, const KeyScope* scope, NodeStatus again_on) {
    auto& rt = node.runtime();
    auto& child = node.children().front();
    const NodeStatus s = tick_node(child, env, scope);
    if (s == NodeStatus::Running) {
        rt.status = NodeStatus::Running;
        return NodeStatus::Running;
    }
    if (s != again_on) {
        return finish(node, s, env, scope);
    }
    ++rt.counter;
    if (node.param() != kInfinite && rt.counter >= node.param()) {
        return finish(node, again_on, env, scope);
    }
    halt_node(child, env, scope);
    rt.status = NodeStatus::Running;
    return NodeStatus::Running;
}

NodeStatus tick_subtree(BtNode& node, const TickEnv& env, const KeyScope* scope) {
    if (!node.is_resolved_subtree()) {
        throw BtError(BtErrc::UnresolvedSubTree, node.id());
    }
    const KeyScope inner = child_scope(node, scope);
    const NodeStatus s = tick_node(node.children().front(), env, &inner);
    if (is_terminal(s)) {
        halt_node(node.children().front(), env, &inner);
    }
    node.runtime().status = s;
    return s;
}

NodeStatus tick_node(BtNode& node, const TickEnv& env, const KeyScope* scope) {
    switch (node.kind()) {
        case NodeKind::Action:
        case NodeKind::Condition:
            return tick_leaf(node, env, scope);
        case NodeKind::Sequence:
            return tick_memory(node, env, scope, NodeStatus::Success);
        case NodeKind::Fallback:
            return tick_memory(node, env, scope, NodeStatus::Failure);
        case NodeKind::ReactiveSequence:
            return tick_reactive(node, env, scope, NodeStatus::Success);
        case NodeKind::ReactiveFallback:
            return tick_reactive(node, env, scope, NodeStatus::Failure);
        case NodeKind::Parallel:
            return tick_parallel(node, env, scope);
        case NodeKind::Repeat:
            return tick_loop(node, env, scope, NodeStatus::Success);
        case NodeKind::Retry:
            return tick_loop(node, env, scope, NodeStatus::Failure);
        case NodeKind::SubTree:
            return tick_subtree(node, env, scope);
    }
    throw BtError(BtErrc::InvalidTree, node.name(), "unknown node kind");
}

void halt_node(BtNode& node, const TickEnv& env, const KeyScope* scope) {
    auto& rt = node.runtime();
    if (is_leaf(node.kind())) {
        if (rt.status == NodeStatus::Running) {
            const LeafImpl* impl = env.registry.find(node.id());
            if (impl != nullptr && impl->halt) {
                LeafContext lc(node, env.blackboard, env.ctx, scope);
                impl->halt(lc);
            }
        }
    } else if (node.kind() == NodeKind::SubTree) {
        if (node.is_resolved_subtree()) {
            const KeyScope inner = child_scope(node, scope);
            halt_node(node.children().front(), env, &inner);
        }
    } else {
        halt_children(node, env, scope);
    }
    rt.status = NodeStatus::Idle;
    rt.cursor = 0;
    rt.counter = 0;
    rt.leaf_state.reset();
}

}  // namespace

std::string TraceEntry::to_line() const {
    std::ostringstream out;
    out << "tick=" << tick << " node=" << node << " status=" << status_letter(status);
    return out.str();
}

void TraceLog::record(std::uint64_t tick, std::string node, NodeStatus status) {
    entries_.push_back(TraceEntry{tick, std::move(node), status});
}

bool TraceLog::contains_node(const std::string& node) const { return count(node) > 0; }

std::size_t TraceLog::count(const std::string& node) const {
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [&](const TraceEntry& e) { return e.node == node; }));
}

void TraceLog::write(std::ostream& out) const {
    for (const auto& e : entries_) {
        out << e.to_line() << '\n';
    }
}

NodeStatus tick_root(BtNode& tree, const TickEnv& env) { return tick_node(tree, env, nullptr); }

void halt(BtNode& node, const TickEnv& env) { halt_node(node, env, nullptr); }

TreeExecutor::TreeExecutor(BtNode tree, Blackboard& blackboard, const LeafRegistry& registry, TraceLog* trace,
                           const std::atomic<bool>* cancel_flag)
    : tree_(std::move(tree)),
      blackboard_(blackboard),
      registry_(registry),
      trace_(trace),
      start_(std::chrono::steady_clock::now()) {
    ctx_.cancel_flag = cancel_flag;
}

NodeStatus TreeExecutor::tick() {
    ++ctx_.tick_index;
    ctx_.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_);
    return tick_root(tree_, TickEnv{blackboard_, registry_, ctx_, trace_});
}

void TreeExecutor::halt() { bt::halt(tree_, TickEnv{blackboard_, registry_, ctx_, trace_}); }

NodeStatus TreeExecutor::run_until_done(std::uint64_t max_ticks) {
    NodeStatus s = NodeStatus::Running;
    for (std::uint64_t i = 0; i < max_ticks; ++i) {
        s = tick();
        if (is_terminal(s)) {
            return s;
        }
    }
    return s;
}

}  // namespace hfsmbt::bt
