#pragma once

/// @file node.hpp
/// @brief Behavior-tree node model: composites, decorators, leaves, subtrees.
///
/// A BtNode owns its children by value, so a tree is a plain value that can be
/// copied (the server keeps a pristine copy per behavior and instantiates a
/// fresh one per execution). Each node also carries its runtime state: current
/// status, memory cursor, decorator counter and leaf scratch storage.

#include <any>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hfsmbt/bt/status.hpp"

namespace hfsmbt::bt {

enum class NodeKind {
    Action,
    Condition,
    Sequence,
    ReactiveSequence,
    Fallback,
    ReactiveFallback,
    Parallel,
    Repeat,
    Retry,
    SubTree,
};

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(std::string_view name);

constexpr bool is_leaf(NodeKind k) { return k == NodeKind::Action || k == NodeKind::Condition; }
constexpr bool is_decorator(NodeKind k) { return k == NodeKind::Repeat || k == NodeKind::Retry; }
constexpr bool is_composite(NodeKind k) {
    return k == NodeKind::Sequence || k == NodeKind::ReactiveSequence || k == NodeKind::Fallback ||
           k == NodeKind::ReactiveFallback || k == NodeKind::Parallel;
}

/// Value bound to a port: either a blackboard key (written `{key}` in XML)
/// or a literal constant.
struct PortValue {
    bool is_key = false;
    std::string text;

    static PortValue key(std::string k) { return {true, std::move(k)}; }
    static PortValue literal(std::string v) { return {false, std::move(v)}; }

    /// Parses the XML attribute form: `{key}` is a key, anything else literal.
    static PortValue parse(std::string_view attr);
    /// Inverse of parse().
    [[nodiscard]] std::string to_attribute() const;

    friend bool operator==(const PortValue&, const PortValue&) = default;
};

using PortMap = std::map<std::string, PortValue>;

/// Repeat/Retry count meaning "no bound".
inline constexpr int kInfinite = -1;

/// Per-node execution state.
struct NodeRuntime {
    NodeStatus status = NodeStatus::Idle;
    /// Index of the first child not yet finished (memory composites).
    std::size_t cursor = 0;
    /// Completed cycles (Repeat) or failed attempts (Retry).
    int counter = 0;
    /// Leaf-private storage, cleared when the leaf finishes or is halted.
    std::any leaf_state;
};

class BtNode {
public:
    static BtNode action(std::string id, PortMap ports = {}, std::optional<std::string> name = {});
    static BtNode condition(std::string id, PortMap ports = {}, std::optional<std::string> name = {});
    static BtNode sequence(std::vector<BtNode> children, std::optional<std::string> name = {});
    static BtNode reactive_sequence(std::vector<BtNode> children, std::optional<std::string> name = {});
    static BtNode fallback(std::vector<BtNode> children, std::optional<std::string> name = {});
    static BtNode reactive_fallback(std::vector<BtNode> children, std::optional<std::string> name = {});
    static BtNode parallel(int success_threshold, std::vector<BtNode> children,
                           std::optional<std::string> name = {});
    static BtNode repeat(int num_cycles, BtNode child, std::optional<std::string> name = {});
    static BtNode retry(int num_attempts, BtNode child, std::optional<std::string> name = {});
    /// Unresolved reference to another tree; see attach_subtree().
    static BtNode subtree(std::string tree_id, PortMap remaps = {}, std::optional<std::string> name = {});

    /// Generic constructor enforcing every structural invariant. @p param is
    /// the Parallel threshold or the Repeat/Retry count and is ignored for
    /// other kinds. Throws BtError(InvalidTree / InvalidThreshold).
    static BtNode make(NodeKind kind, std::string id, std::vector<BtNode> children, PortMap ports,
                       int param, std::optional<std::string> name);

    [[nodiscard]] NodeKind kind() const noexcept { return kind_; }
    /// Leaf id or referenced tree id; empty for composites and decorators.
    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    /// Display name: the explicit name if one was given, otherwise the id
    /// (leaves, subtrees) or the kind name.
    [[nodiscard]] std::string name() const;
    [[nodiscard]] const std::optional<std::string>& explicit_name() const noexcept { return name_; }
    [[nodiscard]] const std::vector<BtNode>& children() const noexcept { return children_; }
    [[nodiscard]] std::vector<BtNode>& children() noexcept { return children_; }
    /// Leaf ports, or SubTree remaps (subtree-local key -> parent binding).
    [[nodiscard]] const PortMap& ports() const noexcept { return ports_; }
    [[nodiscard]] int success_threshold() const noexcept { return param_; }
    [[nodiscard]] int num_cycles() const noexcept { return param_; }
    [[nodiscard]] int num_attempts() const noexcept { return param_; }
    /// Raw kind-specific parameter (threshold or count), 0 when unused.
    [[nodiscard]] int param() const noexcept { return param_; }

    [[nodiscard]] bool is_resolved_subtree() const noexcept {
        return kind_ == NodeKind::SubTree && children_.size() == 1;
    }
    /// Binds a SubTree reference to an instantiated copy of its tree.
    void attach_subtree(BtNode tree);

    [[nodiscard]] NodeStatus status() const noexcept { return runtime_.status; }
    [[nodiscard]] std::size_t cursor() const noexcept { return runtime_.cursor; }
    [[nodiscard]] NodeRuntime& runtime() noexcept { return runtime_; }
    [[nodiscard]] const NodeRuntime& runtime() const noexcept { return runtime_; }

    /// Equality of kind, ids, names, ports, parameters and children; runtime
    /// state is ignored.
    [[nodiscard]] bool structurally_equal(const BtNode& other) const;

    /// Number of nodes in the tree rooted here.
    [[nodiscard]] std::size_t size() const;

private:
    BtNode() = default;

    NodeKind kind_ = NodeKind::Action;
    std::string id_;
    std::optional<std::string> name_;
    std::vector<BtNode> children_;
    PortMap ports_;
    int param_ = 0;
    NodeRuntime runtime_;
};

/// Paths (slash-joined display names from the root) of the Running leaves.
std::vector<std::string> running_leaf_paths(const BtNode& root);

/// Indented multi-line rendering for diagnostics.
std::string describe(const BtNode& root);

}  // namespace hfsmbt::bt
