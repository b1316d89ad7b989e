#pragma once

/// @file registry.hpp
/// @brief Leaf implementations and the context they are invoked with.

#include <any>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hfsmbt/bt/blackboard.hpp"
#include "hfsmbt/bt/node.hpp"

namespace hfsmbt::bt {

/// Per-tick information visible to leaves.
struct TickContext {
    /// Increases by exactly one per root tick.
    std::uint64_t tick_index = 0;
    std::chrono::milliseconds elapsed{0};
    /// Set from another thread to request cancellation; sampled by the
    /// executor at tick boundaries and readable by leaves.
    const std::atomic<bool>* cancel_flag = nullptr;

    [[nodiscard]] bool cancel_requested() const {
        return cancel_flag != nullptr && cancel_flag->load(std::memory_order_acquire);
    }
};

enum class PortDirection { Input, Output };

struct PortSpec {
    std::string name;
    PortDirection direction = PortDirection::Input;
    bool required = true;
};

/// Chain of SubTree remapping tables, innermost first.
struct KeyScope {
    const PortMap* remaps = nullptr;
    const KeyScope* parent = nullptr;
};

/// What a leaf sees while it runs.
class LeafContext {
public:
    LeafContext(BtNode& node, Blackboard& blackboard, const TickContext& tick, const KeyScope* scope)
        : node_(node), blackboard_(blackboard), tick_(tick), scope_(scope) {}

    [[nodiscard]] const BtNode& node() const { return node_; }
    [[nodiscard]] Blackboard& blackboard() { return blackboard_; }
    [[nodiscard]] const TickContext& tick() const { return tick_; }
    [[nodiscard]] bool cancel_requested() const { return tick_.cancel_requested(); }

    /// Leaf scratch storage, reset when the leaf finishes or is halted.
    [[nodiscard]] std::any& state() { return node_.runtime().leaf_state; }

    /// Resolves a port to its final binding through the SubTree scopes.
    [[nodiscard]] std::optional<PortValue> binding(const std::string& port) const;

    /// Reads an input port. Keys are read from the blackboard (absent key ->
    /// BlackboardKeyMissing); literals come back as strings.
    [[nodiscard]] Value input(const std::string& port) const;
    [[nodiscard]] std::optional<Value> try_input(const std::string& port) const;

    /// Typed input; string literals are converted to bool, integer, real or
    /// pose ("x;y;heading") as requested.
    template <class T>
    [[nodiscard]] T input_as(const std::string& port) const;

    /// Writes an output port. The port must be bound to a key.
    void output(const std::string& port, Value value);

private:
    BtNode& node_;
    Blackboard& blackboard_;
    const TickContext& tick_;
    const KeyScope* scope_;
};

/// Converts a literal port string; throws BtError(BlackboardTypeMismatch).
Value convert_literal(const std::string& port, const std::string& text, std::string_view wanted);

template <class T>
T LeafContext::input_as(const std::string& port) const {
    Value v = input(port);
    if (auto* typed = std::get_if<T>(&v)) {
        return std::move(*typed);
    }
    if (auto* text = std::get_if<std::string>(&v)) {
        const char* wanted = value_type_name(Value{T{}});
        Value converted = convert_literal(port, *text, wanted);
        if (auto* typed = std::get_if<T>(&converted)) {
            return std::move(*typed);
        }
    }
    if constexpr (std::is_same_v<T, double>) {
        if (auto* i = std::get_if<std::int64_t>(&v)) {
            return static_cast<double>(*i);
        }
    }
    throw BtError(BtErrc::BlackboardTypeMismatch, port,
                  std::string("port holds ") + value_type_name(v));
}

using LeafTick = std::function<NodeStatus(LeafContext&)>;
using LeafHalt = std::function<void(LeafContext&)>;

struct LeafImpl {
    NodeKind kind = NodeKind::Action;
    LeafTick tick;
    /// Called exactly once when a Running leaf is halted.
    LeafHalt halt;
    std::vector<PortSpec> ports;
};

class LeafRegistry {
public:
    void register_action(const std::string& id, LeafTick tick, LeafHalt halt = {},
                         std::vector<PortSpec> ports = {});
    void register_condition(const std::string& id, LeafTick tick, std::vector<PortSpec> ports = {});

    [[nodiscard]] const LeafImpl* find(const std::string& id) const;
    [[nodiscard]] bool contains(const std::string& id) const { return find(id) != nullptr; }
    [[nodiscard]] std::vector<std::string> ids() const;

private:
    std::map<std::string, LeafImpl> leaves_;
};

}  // namespace hfsmbt::bt
